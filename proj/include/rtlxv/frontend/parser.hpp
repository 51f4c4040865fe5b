#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtlxv/diagnostic.hpp"
#include "rtlxv/frontend/ast.hpp"

namespace rtlxv::frontend {

struct ParseResult {
    std::optional<ast::Module> module;     // set iff no error diagnostics
    std::vector<Diagnostic> diagnostics;   // errors and warnings, in source order

    [[nodiscard]] bool ok() const { return module.has_value(); }
};

/// Parses exactly one module from `src`.
[[nodiscard]] ParseResult parse_module(const SourceUnit& src);

struct UnsupportedFeature {
    std::string feature;
    int line = 1;
    int column = 1;
};

/// Lists every construct of `m` outside the accepted subset; empty means ok.
[[nodiscard]] std::vector<UnsupportedFeature> validate_subset(const ast::Module& m);

/// Prints an accepted module back to Verilog; re-parsing yields an equal AST.
[[nodiscard]] std::string print_module(const ast::Module& m);
[[nodiscard]] std::string print_expr(const ast::Expr& e);

using ParamValues = std::map<std::string, std::int64_t, std::less<>>;

/// Folds a constant expression over integer parameters; nullopt if not constant.
[[nodiscard]] std::optional<std::int64_t> eval_const(const ast::Expr& e, const ParamValues& params);

/// Evaluates header and body parameters in order, applying `overrides` to non-local ones.
[[nodiscard]] std::optional<ParamValues> elaborate_params(const ast::Module& m,
                                                          const ParamValues& overrides,
                                                          std::vector<Diagnostic>* diags = nullptr);

}  // namespace rtlxv::frontend
