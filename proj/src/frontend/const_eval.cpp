#include "rtlxv/frontend/parser.hpp"

namespace rtlxv::frontend {

std::optional<std::int64_t> eval_const(const ast::Expr& e, const ParamValues& params) {
    using ast::ExprKind;
    switch (e.kind) {
        case ExprKind::number:
            if (e.dont_care != 0) return std::nullopt;
            if (e.is_signed && e.width < 64 && (e.value >> (e.width - 1)) & 1) {
                return static_cast<std::int64_t>(e.value) - (std::int64_t{1} << e.width);
            }
            return static_cast<std::int64_t>(e.value);
        case ExprKind::ident: {
            auto it = params.find(e.name);
            if (it == params.end()) return std::nullopt;
            return it->second;
        }
        case ExprKind::call:
            return eval_const(e.args[0], params);
        case ExprKind::unary: {
            auto v = eval_const(e.args[0], params);
            if (!v) return std::nullopt;
            if (e.op == "+") return *v;
            if (e.op == "-") return -*v;
            if (e.op == "~") return ~*v;
            if (e.op == "!") return *v == 0 ? 1 : 0;
            return std::nullopt;
        }
        case ExprKind::binary: {
            auto a = eval_const(e.args[0], params);
            auto b = eval_const(e.args[1], params);
            if (!a || !b) return std::nullopt;
            const std::string& op = e.op;
            if (op == "+") return *a + *b;
            if (op == "-") return *a - *b;
            if (op == "*") return *a * *b;
            if (op == "/") return *b == 0 ? std::nullopt : std::optional<std::int64_t>(*a / *b);
            if (op == "%") return *b == 0 ? std::nullopt : std::optional<std::int64_t>(*a % *b);
            if (op == "&") return *a & *b;
            if (op == "|") return *a | *b;
            if (op == "^") return *a ^ *b;
            if (op == "<<" || op == "<<<") return (*b < 0 || *b > 62) ? 0 : *a << *b;
            if (op == ">>" || op == ">>>") return (*b < 0 || *b > 62) ? 0 : *a >> *b;
            if (op == "==") return *a == *b;
            if (op == "!=") return *a != *b;
            if (op == "<") return *a < *b;
            if (op == "<=") return *a <= *b;
            if (op == ">") return *a > *b;
            if (op == ">=") return *a >= *b;
            if (op == "&&") return (*a != 0) && (*b != 0);
            if (op == "||") return (*a != 0) || (*b != 0);
            if (op == "**") {
                if (*b < 0) return std::nullopt;
                std::int64_t r = 1;
                for (std::int64_t i = 0; i < *b && i < 64; ++i) r *= *a;
                return r;
            }
            return std::nullopt;
        }
        case ExprKind::ternary: {
            auto c = eval_const(e.args[0], params);
            if (!c) return std::nullopt;
            return eval_const(e.args[*c != 0 ? 1 : 2], params);
        }
        default:
            return std::nullopt;
    }
}

std::optional<ParamValues> elaborate_params(const ast::Module& m, const ParamValues& overrides,
                                            std::vector<Diagnostic>* diags) {
    ParamValues values;
    bool ok = true;
    for (const auto& p : m.params) {
        auto ov = overrides.find(p.name);
        if (ov != overrides.end() && !p.local) {
            values[p.name] = ov->second;
            continue;
        }
        auto v = eval_const(p.value, values);
        if (!v) {
            ok = false;
            if (diags) {
                diags->push_back({Severity::error, "parameter '" + p.name + "' is not a constant integer",
                                  p.loc.line, p.loc.column});
            }
            continue;
        }
        values[p.name] = *v;
    }
    for (const auto& [name, _] : overrides) {
        bool found = false;
        for (const auto& p : m.params) found = found || (p.name == name && !p.local);
        if (!found) {
            ok = false;
            if (diags) diags->push_back({Severity::error, "no overridable parameter named '" + name + "'", 1, 1});
        }
    }
    if (!ok) return std::nullopt;
    return values;
}

}  // namespace rtlxv::frontend
