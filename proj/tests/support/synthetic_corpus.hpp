#pragma once

// Generated designs for contamination-filter runs, plus rename/reformat rewriting of existing sources.

#include <map>
#include <string>
#include <vector>

#include "rtlxv/diagnostic.hpp"
#include "rtlxv/frontend/lexer.hpp"

namespace rtlxv::test {

/// Structurally distinct designs: xor-masked binary ops and stepped counters.
inline std::vector<SourceUnit> generated_designs(int count) {
    static const char* ops[] = {"+", "-", "&", "|", "^"};
    std::vector<SourceUnit> out;
    for (int i = 0; i < count; ++i) {
        std::string text;
        if (i % 3 == 2) {
            text = "module gen" + std::to_string(i) + "(input clk, input rst, input en, output reg [11:0] c);\n" +
                   "  always @(posedge clk) begin\n    if (rst) c <= 12'd0;\n    else if (en) c <= c + 12'd" +
                   std::to_string(i + 3) + ";\n  end\nendmodule\n";
        } else {
            text = "module gen" + std::to_string(i) + "(input [9:0] a, input [9:0] b, output [9:0] y);\n" +
                   "  assign y = (a " + ops[i % 5] + " b) ^ 10'd" + std::to_string(i + 1) + ";\nendmodule\n";
        }
        out.push_back({text, "gen" + std::to_string(i) + ".v"});
    }
    return out;
}

/// Same design with every non-keyword identifier renamed, comments added and the layout changed.
/// Numbers are re-spelled in hex when sized.
inline std::string rename_and_reformat(const std::string& verilog, const std::string& prefix) {
    auto lexed = frontend::tokenize(verilog);
    std::map<std::string, std::string> names;
    std::string out = "/* rewritten copy */\n";
    int col = 0;
    for (const auto& t : lexed.tokens) {
        if (t.kind == frontend::TokenKind::end_of_file) break;
        std::string piece = t.text;
        if (t.kind == frontend::TokenKind::identifier && !frontend::is_keyword(t.text)) {
            auto [it, fresh] = names.emplace(t.text, "");
            if (fresh) it->second = prefix + std::to_string(names.size());
            piece = it->second;
        } else if (t.kind == frontend::TokenKind::number && t.sized && t.dont_care == 0 && !t.is_signed) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%d'h%llx", t.width, static_cast<unsigned long long>(t.value));
            piece = buf;
        }
        out += piece;
        if (piece == ";") {
            out += " // step\n";
            col = 0;
        } else {
            out += (++col % 4 == 0) ? "\n\t" : "   ";
        }
    }
    return out + "\n";
}

}  // namespace rtlxv::test
