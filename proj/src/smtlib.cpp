#include "deployopt/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <regex>
#include <sstream>

#include "deployopt/solver.hpp"

namespace deployopt {

namespace {

void append_int(std::string& out, std::int64_t v) {
    if (v < 0) {
        out += "(- ";
        out += std::to_string(-v);
        out += ")";
    } else {
        out += std::to_string(v);
    }
}

void append_sum(std::string& out, const ConstraintIR& ir, const std::vector<Term>& terms) {
    if (terms.empty()) {
        out += "0";
        return;
    }
    const bool single = terms.size() == 1;
    if (!single) out += "(+ ";
    bool first = true;
    for (const auto& t : terms) {
        if (!first) out += " ";
        first = false;
        if (t.coef == 1) {
            out += ir.vars[t.var].name;
        } else {
            out += "(* ";
            append_int(out, t.coef);
            out += " ";
            out += ir.vars[t.var].name;
            out += ")";
        }
    }
    if (!single) out += ")";
}

void append_row(std::string& out, const ConstraintIR& ir, const LinRow& row) {
    const char* rel = row.op == RowOp::Le ? "<=" : row.op == RowOp::Ge ? ">=" : "=";
    out += "(";
    out += rel;
    out += " ";
    append_sum(out, ir, row.terms);
    out += " ";
    append_int(out, row.rhs);
    out += ")";
}

}  // namespace

std::string emit_smtlib(const ConstraintIR& ir, const EmitOptions& opts) {
    if (!ir.lowered && !ir.indicators.empty())
        throw SmtError("UnloweredIndicator",
                       "step-function terms must be lowered before emission");
    std::string out;
    out.reserve(1 << 16);
    out += "(set-logic QF_LIA)\n";
    for (const auto& v : ir.vars) {
        out += "(declare-fun " + v.name + " () Int)\n";
        out += "(assert (and (<= ";
        append_int(out, v.lb);
        out += " " + v.name + ") (<= " + v.name + " ";
        append_int(out, v.ub);
        out += ")))\n";
    }
    for (const auto& row : ir.rows) {
        out += "(assert ";
        append_row(out, ir, row);
        out += ")\n";
    }
    for (const auto& imp : ir.implications) {
        out += "(assert (=> ";
        append_row(out, ir, imp.guard);
        if (imp.then.size() == 1) {
            out += " ";
            append_row(out, ir, imp.then[0]);
        } else {
            out += " (and";
            for (const auto& row : imp.then) {
                out += " ";
                append_row(out, ir, row);
            }
            out += ")";
        }
        out += "))\n";
    }
    std::string cost;
    if (ir.objective.size() == 1) {
        cost = ir.vars[ir.objective[0]].name;
    } else {
        cost = "(+";
        for (int v : ir.objective) cost += " " + ir.vars[v].name;
        cost += ")";
    }
    if (opts.minimize) {
        out += "(minimize " + cost + ")\n";
    } else {
        out += "(declare-fun cost () Int)\n";
        out += "(assert (= cost " + cost + "))\n";
        if (opts.cost_bound) {
            out += "(assert (<= cost ";
            append_int(out, *opts.cost_bound);
            out += "))\n";
        }
    }
    out += "(check-sat)\n(get-model)\n";
    return out;
}

bool model_reports_unsat(const std::string& solver_output) {
    static const std::regex re("(^|\\n)\\s*unsat\\s*($|\\n)");
    return std::regex_search(solver_output, re);
}

DeploymentPlan parse_model(const std::string& solver_output, const ConstraintIR& ir,
                           const ValidatedSpec* spec, const OfferCatalog* catalog) {
    if (model_reports_unsat(solver_output))
        throw SmtError("ModelParseError", "solver reported unsat, no model to parse");

    // matches both "(define-fun x () Int 3)" and the "(- 3)" negative form
    static const std::regex def(
        "\\(define-fun\\s+([A-Za-z_][A-Za-z0-9_]*)\\s*\\(\\s*\\)\\s*Int\\s*"
        "(?:\\(\\s*-\\s*(\\d+)\\s*\\)|(-?\\d+))\\s*\\)");
    std::map<std::string, std::int64_t> values;
    for (std::sregex_iterator it(solver_output.begin(), solver_output.end(), def), end;
         it != end; ++it) {
        const auto& m = *it;
        std::int64_t v = m[2].matched ? -std::stoll(m[2].str()) : std::stoll(m[3].str());
        values[m[1].str()] = v;
    }
    if (values.empty())
        throw SmtError("ModelParseError", "no (define-fun ...) bindings in solver output");

    std::vector<std::int64_t> vals(ir.vars.size(), 0);
    for (std::size_t idx = 0; idx < ir.vars.size(); ++idx) {
        auto it = values.find(ir.vars[idx].name);
        if (it == values.end())
            throw SmtError("ModelParseError",
                           "model is missing variable " + ir.vars[idx].name);
        vals[idx] = it->second;
    }

    DeploymentPlan plan;
    plan.assignment.assign(ir.N, std::vector<std::uint8_t>(ir.M, 0));
    plan.types.assign(ir.M, 0);
    plan.occupancy.assign(ir.M, 0);
    for (std::size_t i = 0; i < ir.N; ++i)
        for (std::size_t k = 0; k < ir.M; ++k)
            plan.assignment[i][k] = std::uint8_t(vals[ir.a_var(i, k)]);
    for (std::size_t k = 0; k < ir.M; ++k) {
        std::int64_t t = vals[ir.t_var(k)];
        if (t < 0 || std::size_t(t) > ir.meta.offers.size())
            throw SmtError("ModelParseError",
                           "type value out of range on machine " + std::to_string(k + 1));
        plan.types[k] = t == 0 ? 0 : ir.meta.offers[std::size_t(t) - 1].offer_id;
        plan.occupancy[k] = std::uint8_t(vals[ir.v_var(k)]);
        std::int64_t used = 0;
        for (std::size_t i = 0; i < ir.N; ++i) used += plan.assignment[i][k];
        if ((plan.occupancy[k] != 0) != (used > 0))
            throw SmtError("ModelInconsistent",
                           "occupancy flag disagrees with column " + std::to_string(k + 1));
        if (t > 0) plan.total_price += ir.meta.offers[std::size_t(t) - 1].price;
    }
    if (!point_feasible(ir, vals))
        throw SmtError("ModelInconsistent", "model violates an emitted constraint");
    if (spec && catalog) {
        auto report = check_plan(*spec, *catalog, plan);
        if (!report.passed) {
            std::string what = "model plan fails validation:";
            for (const auto& fam : report.families)
                if (!fam.passed) what += " " + fam.family;
            throw SmtError("ModelInconsistent", what);
        }
    }
    return plan;
}

std::string run_external(const std::string& cmd_template, const std::string& file,
                         std::int64_t timeout_ms) {
    if (cmd_template.empty())
        throw SmtError("ExternalUnavailable", "no external solver command configured");
    std::string cmd = cmd_template;
    auto pos = cmd.find("{file}");
    if (pos != std::string::npos) cmd.replace(pos, 6, file);
    else cmd += " " + file;

    int fds[2];
    if (pipe(fds) != 0) throw SmtError("ExternalUnavailable", "pipe failed");
    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw SmtError("ExternalUnavailable", "fork failed");
    }
    if (pid == 0) {
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[0]);
        close(fds[1]);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), (char*)nullptr);
        _exit(127);
    }
    close(fds[1]);

    std::string output;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    bool timed_out = false;
    char buf[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
        if (left < 0) left = 0;
        struct pollfd pfd{fds[0], POLLIN, 0};
        int pr = poll(&pfd, 1, int(left > 1000 ? 1000 : left));
        if (pr > 0) {
            ssize_t n = read(fds[0], buf, sizeof buf);
            if (n <= 0) break;  // child closed its end
            output.append(buf, std::size_t(n));
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
    }
    close(fds[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (timed_out) throw SmtError("ExternalTimeout", "external solver hit the time limit");
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
        throw SmtError("ExternalUnavailable", "command not found: " + cmd);
    return output;
}

}  // namespace deployopt
