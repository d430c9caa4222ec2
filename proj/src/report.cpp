#include "operstokes/report.hpp"

#include <ostream>

namespace operstokes {

Json rational_matrix_json(const RationalMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_fraction_string(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json layout_json(const SectorLayout& lay) {
    Json dirs = Json::array();
    for (int i = 1; i <= lay.r; ++i) {
        const auto& d = lay.direction(i);
        Json pairs = Json::array();
        for (auto [a, b] : d.pairs) pairs.push_back(Json::array({a, b}));
        dirs.push_back({{"index", i}, {"angle_over_pi", to_fraction_string(d.angle)}, {"pairs", pairs}});
    }
    return {{"r", lay.r},
            {"ell", lay.ell},
            {"v0_over_pi", to_fraction_string(lay.v0)},
            {"supersector_half_width_over_pi", to_fraction_string(make_rational(1, 2L * (lay.k + 1)))},
            {"directions", dirs}};
}

std::string layout_csv(const SectorLayout& lay) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,angle_over_pi,angle_rad,pairs\n";
    for (int i = 1; i <= lay.r; ++i) {
        const auto& d = lay.direction(i);
        os << i << ',' << to_fraction_string(d.angle) << ',' << d.angle.get_d() * pi_v<double>() << ',';
        for (std::size_t p = 0; p < d.pairs.size(); ++p)
            os << (p ? " " : "") << d.pairs[p].first << '>' << d.pairs[p].second;
        os << '\n';
    }
    return os.str();
}

Json solvability_json(const SolvabilityReport& r) {
    Json out{{"n", r.n},
             {"k", r.k},
             {"d", r.d},
             {"D", r.D},
             {"max_pdot_degree", r.max_pdot_degree},
             {"tangent_dim", r.tangent_dim},
             {"homogeneous_kernel_dim", r.homogeneous_kernel_dim},
             {"traceless_kernel_dim", r.traceless_kernel_dim},
             {"injective", r.tangent_dim == 0}};
    if (r.witness) {
        Json pd = Json::array();
        for (const auto& c : r.witness->pdot.coefficients()) pd.push_back(to_fraction_string(c));
        out["witness"] = {{"pdot", pd}, {"residual_zero", r.witness_residual_zero}};
    }
    return out;
}

Json lemma_suite_json(const LemmaSuite& s) {
    Json checks = Json::array();
    for (const auto& c : s.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"checked", c.checked}, {"violations", c.violations}});
    return {{"n", s.n}, {"passed", s.passed()}, {"checks", checks}};
}

Json weight_report_json(const WeightReport& r) {
    Json ex = Json::array();
    for (const auto& e : r.expressions)
        ex.push_back({{"i", e.i},
                      {"groups", e.groups.size()},
                      {"only_allowed_groups", e.only_allowed_groups},
                      {"weights_match", e.weights_match},
                      {"signs_uniform", e.signs_uniform},
                      {"violations", e.violations}});
    return {{"n", r.n}, {"passed", r.passed()}, {"expressions", ex}};
}

Json reduction_json(const ReductionCheck& r) {
    return {{"n", r.n}, {"d", r.d}, {"samples", r.samples}, {"mismatches", r.mismatches}, {"passed", r.passed()}};
}

Json jacobian_json(const JacobianReport& r) {
    Json params = Json::array();
    for (const auto& c : r.params) params.push_back(complex_json(c));
    return {{"n", r.n},
            {"k", r.k},
            {"d", r.d},
            {"params", params},
            {"jacobian", matrix_json(r.jacobian)},
            {"singular_values", r.singular_values},
            {"rank", r.rank},
            {"full_rank", r.rank == r.d - 1},
            {"gap", r.gap},
            {"h", r.h},
            {"rank_tol", r.rank_tol},
            {"holomorphy_defect", r.holomorphy_defect},
            {"radius", r.radius},
            {"residuals", {{"identity", r.identity_residual}, {"unipotency", r.unipotency_residual}}},
            {"evaluations", r.evaluations}};
}

Json cross_check_json(const CrossCheckReport& r) {
    return {{"exact", solvability_json(r.exact)},
            {"numeric", jacobian_json(r.numeric)},
            {"exact_injective", r.exact_injective},
            {"numeric_full_rank", r.numeric_full_rank},
            {"agree", r.agree()}};
}

Json settings_json(const StokesSettings& s) {
    Json out{{"M", s.trunc_order}, {"ode_tol", s.ode_tol}, {"radius_tol", s.radius_tol}};
    out["R"] = s.radius > 0 ? Json(s.radius) : Json("adaptive");
    if (s.v0) out["v0_over_pi"] = to_fraction_string(*s.v0);
    // where adjacent canonical solutions are compared, and which log branch is used
    out["comparison"] = "values at z = 0 after inward transport along sample rays";
    out["log_branch"] = "continuous in the angle from the base sector, principal in Sect_0";
    return out;
}

void write_basis_text(std::ostream& os, const WeightBasis& basis, const StructureTables& tables) {
    const std::size_t n = static_cast<std::size_t>(basis.n());
    for (std::size_t idx = 0; idx < basis.size(); ++idx) {
        auto [i, j] = basis.label(idx);
        os << "v " << i << ' ' << j << '\n';
        const auto& m = basis.v(i, j);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) os << (c ? " " : "") << to_fraction_string(m(r, c));
            os << '\n';
        }
    }
    tables.write_text(os);
}

}  // namespace operstokes
