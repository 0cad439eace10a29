#include "vofrac/study.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "vofrac/direct_l21.hpp"
#include "vofrac/error.hpp"
#include "vofrac/esa_quadrature.hpp"
#include "vofrac/fast_fl21.hpp"
#include "vofrac/problems.hpp"
#include "vofrac/scalar_evaluators.hpp"

namespace vofrac {

namespace {

constexpr const char* kCsvHeader = "m,n,error,order,wall_time_s,storage_scalars";

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view s, const char* what)
{
    s = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw InvalidArgument(std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s, const char* what)
{
    s = trim(s);
    const std::string copy(s);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size())
        throw InvalidArgument(std::string("bad ") + what + " '" + copy + "'");
    return v;
}

std::string format_g6(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ConvergenceRow blank_row(const Rung& rung)
{
    ConvergenceRow row;
    row.m = rung.m;
    row.n = rung.n;
    return row;
}

bool is_order_study(StudyKind k)
{
    return k == StudyKind::temporal_order || k == StudyKind::spacetime_order;
}

ProblemSpec make_problem(const StudySpec& spec, int m)
{
    const OrderFunction order = OrderFunction::parse(spec.order, spec.horizon);
    switch (spec.problem) {
    case ProblemId::example1_2d:
        return manufactured_problem(2, m, spec.horizon, order);
    case ProblemId::example2_3d:
        return manufactured_problem(3, m, spec.horizon, order);
    case ProblemId::scalar_ode:
        break;
    }
    throw InvalidArgument("problem has no spatial mesh");
}

SolverConfig make_config(const StudySpec& spec, const ProblemSpec& problem, Scheme scheme, int n)
{
    SolverConfig cfg;
    cfg.scheme = scheme;
    cfg.steps = n;
    cfg.max_storage = spec.max_storage;
    if (scheme == Scheme::fast)
        cfg.epsilon = spec.epsilon.resolve(problem.order.alpha_lo(), problem.order.alpha_hi(), problem.horizon / n);
    return cfg;
}

// Samples of the scalar trajectory and its exact Caputo values at t_{k+sigma_k}.
struct ScalarSetup {
    OrderFunction order;
    SigmaSchedule schedule;
    std::vector<double> samples;
    std::vector<double> exact;
};

ScalarSetup scalar_setup(const StudySpec& spec, int n)
{
    const OrderFunction order = OrderFunction::parse(spec.order, spec.horizon);
    const ScalarProblem sp = scalar_ode(order);
    const TemporalMesh tmesh(spec.horizon, n);
    ScalarSetup s{order, build_schedule(tmesh, order), {}, {}};
    s.samples.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        s.samples[static_cast<std::size_t>(k)] = sp.u(tmesh.node(k));
    s.exact.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        s.exact[static_cast<std::size_t>(k)] = sp.caputo(s.schedule.t_sigma[static_cast<std::size_t>(k)]);
    return s;
}

EsaQuadrature make_quadrature(const StudySpec& spec, const OrderFunction& order, double dt)
{
    const double eps = spec.epsilon.resolve(order.alpha_lo(), order.alpha_hi(), dt);
    return EsaQuadrature(compute_esa_params(eps, order.alpha_lo(), order.alpha_hi(), dt, spec.horizon));
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b)
{
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        g = std::max(g, std::abs(a[i] - b[i]));
    return g;
}

ScalarEvaluation evaluate_scalar(const StudySpec& spec, Scheme scheme, const ScalarSetup& s)
{
    if (scheme == Scheme::direct) {
        if (spec.max_storage && 2 * s.samples.size() - 1 > *spec.max_storage)
            throw StorageLimitExceeded("direct evaluator would exceed the storage cap");
        return evaluate_direct_trajectory(s.schedule, s.samples);
    }
    const EsaQuadrature quad = make_quadrature(spec, s.order, s.schedule.dt);
    return evaluate_fast_trajectory(s.schedule, quad, s.samples);
}

ConvergenceRow run_scalar_rung(const StudySpec& spec, const Rung& rung)
{
    ConvergenceRow row = blank_row(rung);
    const ScalarSetup s = scalar_setup(spec, rung.n);
    switch (spec.kind) {
    case StudyKind::agreement: {
        const ScalarEvaluation direct = evaluate_scalar(spec, Scheme::direct, s);
        const ScalarEvaluation fast = evaluate_scalar(spec, Scheme::fast, s);
        row.error = max_gap(direct.values, fast.values);
        row.wall_time = fast.wall_time;
        row.storage = fast.peak_storage;
        return row;
    }
    default: {
        const int repeats = spec.kind == StudyKind::scaling ? std::max(1, spec.timing_repeats) : 1;
        ScalarEvaluation best;
        best.wall_time = std::numeric_limits<double>::infinity();
        for (int r = 0; r < repeats; ++r) {
            ScalarEvaluation e = evaluate_scalar(spec, spec.scheme, s);
            if (e.wall_time < best.wall_time)
                best = std::move(e);
        }
        row.error = max_gap(best.values, s.exact);
        row.wall_time = best.wall_time;
        row.storage = best.peak_storage;
        return row;
    }
    }
}

ConvergenceRow run_field_rung(const StudySpec& spec, const Rung& rung)
{
    ConvergenceRow row = blank_row(rung);
    const ProblemSpec problem = make_problem(spec, rung.m);
    if (spec.kind == StudyKind::agreement) {
        const RunReport direct = run(problem, make_config(spec, problem, Scheme::direct, rung.n));
        const RunReport fast = run(problem, make_config(spec, problem, Scheme::fast, rung.n));
        double gap = 0.0;
        for (std::size_t i = 0; i < direct.final_field.size(); ++i)
            gap = std::max(gap, std::abs(direct.final_field[i] - fast.final_field[i]));
        row.error = gap;
        row.wall_time = fast.wall_time;
        row.storage = fast.peak_storage;
        return row;
    }
    const int repeats = spec.kind == StudyKind::scaling ? std::max(1, spec.timing_repeats) : 1;
    for (int r = 0; r < repeats; ++r) {
        const RunReport rep = run(problem, make_config(spec, problem, spec.scheme, rung.n));
        if (r == 0 || rep.wall_time < row.wall_time)
            row.wall_time = rep.wall_time;
        row.error = rep.max_error;
        row.storage = rep.peak_storage;
    }
    return row;
}

ConvergenceRow run_certify_rung(const StudySpec& spec, const Rung& rung)
{
    ConvergenceRow row = blank_row(rung);
    const OrderFunction order = OrderFunction::parse(spec.order, spec.horizon);
    const double dt = spec.horizon / rung.n;
    const EsaQuadrature quad = make_quadrature(spec, order, dt);
    const auto start = std::chrono::steady_clock::now();
    const CertifyReport rep = certify(quad, 10000, 10);
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.error = rep.max_rel_err;
    row.storage = quad.size();
    if (!rep.passed) {
        std::ostringstream msg;
        msg << "relative kernel error " << rep.max_rel_err << " exceeds eps " << quad.params().epsilon << " at s = "
            << rep.argmax_s << ", alpha = " << rep.argmax_alpha;
        row.failure = msg.str();
    }
    return row;
}

ConvergenceRow run_audit_rung(const StudySpec& spec, const Rung& rung)
{
    ConvergenceRow row = blank_row(rung);
    const OrderFunction order = OrderFunction::parse(spec.order, spec.horizon);
    const TemporalMesh tmesh(spec.horizon, rung.n);
    const SigmaSchedule schedule = build_schedule(tmesh, order);
    const EsaQuadrature quad = make_quadrature(spec, order, tmesh.dt());
    const double eps = quad.params().epsilon;
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int violations = 0;
    std::string first;
    for (int k = 0; k < rung.n; ++k) {
        const CoefficientRowRho rho = rho_row(k, quad, schedule);
        const CoefficientRowG g = g_row(k, schedule);
        const RhoReport props = check_rho_properties(rho, schedule, eps);
        const GapReport gap = check_rho_gap(rho, g, schedule, eps);
        worst = std::max(worst, gap.worst_ratio);
        if (!props.passed || !gap.passed) {
            ++violations;
            if (first.empty()) {
                std::ostringstream msg;
                msg << "row " << k << ": " << (props.passed ? "gap bound exceeded" : props.failure);
                first = msg.str();
            }
        }
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.error = worst;
    row.storage = quad.size();
    if (violations > 0)
        row.failure = std::to_string(violations) + " violating rows; first at " + first;
    return row;
}

ConvergenceRow run_rung(const StudySpec& spec, const Rung& rung)
{
    try {
        switch (spec.kind) {
        case StudyKind::kernel_certify:
            return run_certify_rung(spec, rung);
        case StudyKind::coefficient_audit:
            return run_audit_rung(spec, rung);
        default:
            return spec.problem == ProblemId::scalar_ode ? run_scalar_rung(spec, rung) : run_field_rung(spec, rung);
        }
    } catch (const Error& e) {
        ConvergenceRow row = blank_row(rung);
        row.failure = e.what();
        return row;
    } catch (const std::bad_alloc&) {
        ConvergenceRow row = blank_row(rung);
        row.failure = "out of memory";
        return row;
    }
}

} // namespace

StudyKind parse_study_kind(std::string_view name)
{
    for (StudyKind k : {StudyKind::temporal_order, StudyKind::spacetime_order, StudyKind::scaling,
                        StudyKind::agreement, StudyKind::kernel_certify, StudyKind::coefficient_audit})
        if (name == to_string(k))
            return k;
    throw InvalidArgument("unknown study '" + std::string(name) + "'");
}

ProblemId parse_problem_id(std::string_view name)
{
    for (ProblemId p : {ProblemId::example1_2d, ProblemId::example2_3d, ProblemId::scalar_ode})
        if (name == to_string(p))
            return p;
    throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

const char* to_string(StudyKind kind) noexcept
{
    switch (kind) {
    case StudyKind::temporal_order: return "temporal_order";
    case StudyKind::spacetime_order: return "spacetime_order";
    case StudyKind::scaling: return "scaling";
    case StudyKind::agreement: return "agreement";
    case StudyKind::kernel_certify: return "kernel_certify";
    case StudyKind::coefficient_audit: return "coefficient_audit";
    }
    return "?";
}

const char* to_string(ProblemId id) noexcept
{
    switch (id) {
    case ProblemId::example1_2d: return "example1_2d";
    case ProblemId::example2_3d: return "example2_3d";
    case ProblemId::scalar_ode: return "scalar_ode";
    }
    return "?";
}

std::vector<Rung> parse_ladder(std::string_view text)
{
    std::vector<Rung> out;
    if (trim(text).empty())
        return out;
    for (std::string_view item : split(text, ',')) {
        const auto parts = split(trim(item), ':');
        Rung r;
        if (parts.size() == 1) {
            r.n = parse_int(parts[0], "rung");
        } else if (parts.size() == 2) {
            r.m = parse_int(parts[0], "rung m");
            r.n = parse_int(parts[1], "rung n");
        } else {
            throw InvalidArgument("rung '" + std::string(item) + "' is not m:n");
        }
        if (r.n < 1 || r.m < 0)
            throw InvalidArgument("rung '" + std::string(item) + "' has a non-positive size");
        out.push_back(r);
    }
    return out;
}

void validate_ladder(const std::vector<Rung>& ladder, StudyKind kind)
{
    if (ladder.empty())
        throw InvalidArgument("ladder is empty");
    if (is_order_study(kind) && ladder.size() < 2)
        throw InvalidArgument("an order study needs at least two rungs");
    const bool refining = is_order_study(kind) || kind == StudyKind::scaling || kind == StudyKind::agreement;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        const Rung& a = ladder[i - 1];
        const Rung& b = ladder[i];
        if (!refining) {
            if (b.n < a.n || (b.n == a.n && b.m <= a.m))
                throw InvalidArgument("ladder must be sorted by n");
            continue;
        }
        const bool m_ok = b.m == a.m || b.m == 2 * a.m;
        const bool n_ok = b.n == a.n || b.n == 2 * a.n || b.n == 4 * a.n;
        if (!m_ok || !n_ok || (b.m == a.m && b.n == a.n)) {
            std::ostringstream msg;
            msg << "rung " << b.m << ":" << b.n << " does not refine " << a.m << ":" << a.n
                << " (m must stay or double, n must stay, double or quadruple)";
            throw InvalidArgument(msg.str());
        }
    }
}

EpsilonPolicy EpsilonPolicy::parse(std::string_view text)
{
    text = trim(text);
    if (text == "dt2" || text == "dt_squared")
        return {};
    const double v = parse_double(text, "epsilon");
    if (!(v > 0.0 && v <= std::exp(-1.0)))
        throw InvalidArgument("epsilon must lie in (0, 1/e]");
    return {false, v};
}

double EpsilonPolicy::resolve(double alpha_lo, double alpha_hi, double dt) const
{
    return dt_squared ? default_epsilon(alpha_lo, alpha_hi, dt) : value;
}

bool ConvergenceReport::ok() const
{
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.failure.empty() && r.error; });
}

void fill_orders(ConvergenceReport& report)
{
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        ConvergenceRow& r = report.rows[i];
        r.order.reset();
        if (i == 0 || !r.error || !report.rows[i - 1].error)
            continue;
        const double prev = *report.rows[i - 1].error;
        if (prev > 0.0 && *r.error > 0.0)
            r.order = std::log2(prev / *r.error);
    }
}

ConvergenceReport run_study(const StudySpec& spec)
{
    validate_ladder(spec.ladder, spec.kind);
    if (spec.problem != ProblemId::scalar_ode && spec.kind != StudyKind::kernel_certify &&
        spec.kind != StudyKind::coefficient_audit)
        for (const Rung& r : spec.ladder)
            if (r.m < 2)
                throw InvalidArgument("field problems need m >= 2 on every rung");

    ConvergenceReport report;
    if (spec.parallel_rungs && spec.kind != StudyKind::scaling) {
        std::vector<std::future<ConvergenceRow>> jobs;
        for (const Rung& r : spec.ladder)
            jobs.push_back(std::async(std::launch::async, [&spec, r] { return run_rung(spec, r); }));
        for (auto& j : jobs)
            report.rows.push_back(j.get());
    } else {
        for (const Rung& r : spec.ladder)
            report.rows.push_back(run_rung(spec, r));
    }
    // Certification and audit rows hold a worst-case ratio, not an error.
    if (spec.kind != StudyKind::kernel_certify && spec.kind != StudyKind::coefficient_audit)
        fill_orders(report);
    return report;
}

std::string to_csv(const ConvergenceReport& report)
{
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const ConvergenceRow& r : report.rows) {
        out << r.m << ',' << r.n << ',';
        if (!r.error) {
            out << "-,-,-,-\n";
            continue;
        }
        out << format_g6(*r.error) << ',';
        if (r.order)
            out << format_g6(*r.order);
        out << ',' << format_g6(r.wall_time) << ',' << r.storage << '\n';
    }
    return out.str();
}

ConvergenceReport parse_csv(std::string_view text)
{
    ConvergenceReport report;
    auto lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != kCsvHeader)
        throw InvalidArgument("CSV does not start with the expected header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty())
            continue;
        const auto cells = split(line, ',');
        if (cells.size() != 6)
            throw InvalidArgument("CSV row " + std::to_string(i) + " does not have 6 cells");
        ConvergenceRow r;
        r.m = parse_int(cells[0], "m");
        r.n = parse_int(cells[1], "n");
        if (trim(cells[2]) == "-") {
            r.failure = "failed";
        } else {
            r.error = parse_double(cells[2], "error");
            if (!trim(cells[3]).empty())
                r.order = parse_double(cells[3], "order");
            r.wall_time = parse_double(cells[4], "wall time");
            r.storage = static_cast<std::size_t>(parse_double(cells[5], "storage"));
        }
        report.rows.push_back(std::move(r));
    }
    return report;
}

void emit_csv(const ConvergenceReport& report, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    out << to_csv(report);
    if (!out)
        throw Error("write to '" + path + "' failed");
}

std::string to_markdown(const ConvergenceReport& report, const StudySpec& spec)
{
    std::ostringstream out;
    out << "### " << to_string(spec.kind) << " / " << to_string(spec.problem) << " / " << to_string(spec.scheme)
        << "\n\n| m | n | E | Order | CPU (s) | Storage |\n|---|---|---|---|---|---|\n";
    char buf[64];
    for (const ConvergenceRow& r : report.rows) {
        out << "| " << r.m << " | " << r.n << " | ";
        if (!r.error) {
            out << "- | - | - | - |\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%.4e", *r.error);
        out << buf << " | ";
        if (r.order) {
            std::snprintf(buf, sizeof buf, "%.2f", *r.order);
            out << buf;
        } else {
            out << "-";
        }
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_time);
        out << " | " << buf << " | " << r.storage << " |\n";
    }
    return out.str();
}

} // namespace vofrac
