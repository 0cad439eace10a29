#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vofrac/subdiffusion_solver.hpp"

namespace vofrac {

enum class StudyKind { temporal_order, spacetime_order, scaling, agreement, kernel_certify, coefficient_audit };
enum class ProblemId { example1_2d, example2_3d, scalar_ode };

StudyKind parse_study_kind(std::string_view name);
ProblemId parse_problem_id(std::string_view name);
const char* to_string(StudyKind kind) noexcept;
const char* to_string(ProblemId id) noexcept;

/// A rung of a refinement ladder. Scalar studies ignore m.
struct Rung {
    int m = 0;
    int n = 0;
};

/// Parses "m:n,m:n,..." (a bare "n" means m = 0).
std::vector<Rung> parse_ladder(std::string_view text);

/// Rungs must refine monotonically: m grows by 1x or 2x, n by 1x, 2x or
/// 4x, and at least one of them grows (order, scaling and agreement
/// studies; the others only need rungs sorted by n). Order studies need
/// two rungs.
void validate_ladder(const std::vector<Rung>& ladder, StudyKind kind);

/// `dt_squared` uses eps = min(dt^2, the coefficient-property bound / 2, 1/e).
struct EpsilonPolicy {
    bool dt_squared = true;
    double value = 0.0;

    static EpsilonPolicy parse(std::string_view text); ///< "dt2" or a number
    double resolve(double alpha_lo, double alpha_hi, double dt) const;
};

struct StudySpec {
    StudyKind kind = StudyKind::spacetime_order;
    ProblemId problem = ProblemId::example1_2d;
    Scheme scheme = Scheme::fast;
    std::vector<Rung> ladder;
    EpsilonPolicy epsilon;
    std::string order = "sin4"; ///< OrderFunction::parse syntax
    double horizon = 1.0;
    std::optional<std::size_t> max_storage;
    bool parallel_rungs = false;
    int timing_repeats = 3; ///< scaling studies keep the best time
};

struct ConvergenceRow {
    int m = 0;
    int n = 0;
    std::optional<double> error; ///< empty when the rung failed
    std::optional<double> order; ///< log2(E_previous / E_this)
    double wall_time = 0.0;
    std::size_t storage = 0;
    std::string failure; ///< reason, empty on success
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;

    bool ok() const;
};

/// Runs every rung and fills in the orders. The error column holds the
/// max-norm error (order studies, scaling), the fast/direct discrepancy
/// (agreement), the worst relative kernel error (kernel_certify) or the
/// worst gap-to-bound ratio (coefficient_audit); the last two get no order.
ConvergenceReport run_study(const StudySpec& spec);

/// Recomputes the order column from the error column.
void fill_orders(ConvergenceReport& report);

/// Header `m,n,error,order,wall_time_s,storage_scalars`, values with six
/// significant digits, an empty order cell when there is no previous rung,
/// "-" for the cells of a failed rung.
std::string to_csv(const ConvergenceReport& report);
ConvergenceReport parse_csv(std::string_view text);
void emit_csv(const ConvergenceReport& report, const std::string& path);

/// Table with errors to five significant digits and orders to two decimals.
std::string to_markdown(const ConvergenceReport& report, const StudySpec& spec);

} // namespace vofrac
