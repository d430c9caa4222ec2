#pragma once

#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "operstokes/immersion.hpp"
#include "operstokes/scalar.hpp"
#include "operstokes/sl2.hpp"
#include "operstokes/stokes.hpp"

namespace operstokes {

using Json = nlohmann::ordered_json;

// Doubles go out as JSON numbers; wider types as decimal strings with every
// significant digit, so nothing is rounded through double.
template <class R>
Json real_json(const R& x) {
    if constexpr (std::is_same_v<R, double>) {
        return x;
    } else {
        std::ostringstream os;
        os << std::setprecision(std::numeric_limits<R>::max_digits10) << x;
        return os.str();
    }
}

template <class R>
Json complex_json(const std::complex<R>& z) {
    return Json::array({real_json(z.real()), real_json(z.imag())});
}

template <class R>
Json matrix_json(const Matrix<std::complex<R>>& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json rational_matrix_json(const RationalMatrix& m);
Json layout_json(const SectorLayout& lay);
std::string layout_csv(const SectorLayout& lay);
Json solvability_json(const SolvabilityReport& r);
Json lemma_suite_json(const LemmaSuite& s);
Json weight_report_json(const WeightReport& r);
Json reduction_json(const ReductionCheck& r);
Json jacobian_json(const JacobianReport& r);
Json cross_check_json(const CrossCheckReport& r);
Json settings_json(const StokesSettings& s);
void write_basis_text(std::ostream& os, const WeightBasis& basis, const StructureTables& tables);

template <class R>
Json stokes_json(const StokesData<R>& st, const std::vector<std::complex<R>>& lambda) {
    Json out;
    out["n"] = st.layout.n;
    out["k"] = st.layout.k;
    Json lam = Json::array();
    for (const auto& l : lambda) lam.push_back(complex_json(l));
    out["lambda"] = lam;
    // Q[p-1][a] is the coefficient of z^p in q_a
    Json q = Json::array();
    for (std::size_t p = 1; p < st.formal.q.size(); ++p) {
        Json row = Json::array();
        for (const auto& c : st.formal.q[p]) row.push_back(complex_json(c));
        q.push_back(row);
    }
    out["Q"] = q;
    Json big = Json::array();
    for (const auto& l : st.formal.Lambda) big.push_back(complex_json(l));
    out["Lambda"] = big;
    out["kappa"] = real_json(st.formal.kappa);
    out["layout"] = layout_json(st.layout);
    Json factors = Json::array(), mats = Json::array(), perm = Json::array();
    for (const auto& k : st.factors) factors.push_back(matrix_json(k));
    for (const auto& s : st.matrices) mats.push_back(matrix_json(s));
    for (int p : st.permutation) perm.push_back(p);
    out["stokes_factors"] = factors;
    out["stokes_matrices"] = mats;
    out["permutation"] = perm;
    Json mon = Json::array();
    for (const auto& m : st.monitored()) mon.push_back(complex_json(m));
    out["monitored"] = mon;
    const auto& r = st.residuals;
    out["residuals"] = {{"identity", real_json(r.identity)},     {"unipotency", real_json(r.unipotency)},
                        {"support", real_json(r.support)},       {"trace", real_json(r.trace)},
                        {"asymptotic", real_json(r.asymptotic)}, {"flag", real_json(r.flag)}};
    out["radius"] = real_json(st.radius);
    out["ode_steps"] = st.ode_steps;
    return out;
}

}  // namespace operstokes
