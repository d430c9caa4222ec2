#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "operstokes/exact_linalg.hpp"

namespace operstokes {

// Principal sl(2) inside sl(n): e on the superdiagonal, f on the subdiagonal.
struct Sl2Triple {
    int n = 0;
    RationalMatrix e, f, h;
};

Sl2Triple build_sl2(int n);

// Band S(j): entries (r, c) with c - r = j.
bool in_band(const RationalMatrix& x, int j);

// f_1 .. f_{n-1} (index 0 holds f_1), scaled to coprime positive integers.
std::vector<RationalMatrix> lowest_weight_vectors(const Sl2Triple& t);

class WeightBasis {
public:
    explicit WeightBasis(const Sl2Triple& t);

    int n() const { return triple_.n; }
    const Sl2Triple& triple() const { return triple_; }
    const RationalMatrix& lowest(int i) const;
    const RationalMatrix& v(int i, int j) const;
    std::size_t size() const { return vectors_.size(); }

    // Position of v_{i,j} in the flat ordering (i ascending, then j ascending).
    std::size_t index(int i, int j) const;
    std::pair<int, int> label(std::size_t idx) const;

    // Coefficients of a traceless X in the v basis, flat ordering.
    RationalVector decompose(const RationalMatrix& x) const;

private:
    Sl2Triple triple_;
    std::vector<RationalMatrix> lowest_;
    std::vector<RationalMatrix> vectors_;
    std::vector<std::size_t> offset_;
};

WeightBasis build_weight_basis(const Sl2Triple& t);

class StructureTables {
public:
    explicit StructureTables(const WeightBasis& b);

    int n() const { return n_; }
    // [f~, v_{i,j}] = a(i,j) v_{i,j-1}, defined for -i+1 <= j <= i.
    const BigRational& a(int i, int j) const;
    // [f_{n-1}, v_{n-1-k, n-1-j}] = sum_i c(i,j,k) v_{i,-j}.
    const BigRational& c(int i, int j, int k) const;
    bool has_c(int i, int j, int k) const;

    const std::map<std::pair<int, int>, BigRational>& a_table() const { return a_; }
    const std::map<std::tuple<int, int, int>, BigRational>& c_table() const { return c_; }

    // Negative-control hook used by the verify self-test.
    void set_c(int i, int j, int k, BigRational value);

    void write_text(std::ostream& os) const;

private:
    int n_;
    std::map<std::pair<int, int>, BigRational> a_;
    std::map<std::tuple<int, int, int>, BigRational> c_;
};

StructureTables compute_structure_tables(const WeightBasis& b);

struct CheckResult {
    CheckResult() = default;
    explicit CheckResult(std::string n) : name(std::move(n)) {}

    std::string name;
    bool passed = true;
    std::size_t checked = 0;
    std::vector<std::string> violations;

    void fail(std::string why) {
        passed = false;
        if (violations.size() < 20) violations.push_back(std::move(why));
    }
};

// Sign lemma on c and the ad_f~ recursion linking c(i,j+1,k) to c(i,j,k).
CheckResult verify_sign_property(const StructureTables& t);

struct LemmaSuite {
    int n = 0;
    std::vector<CheckResult> checks;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// Every exact check on the weight basis and tables for one n. With
// `corrupt` set, one c entry is sign-flipped first so the suite must fail.
LemmaSuite run_lemma_suite(int n, bool corrupt = false);

}  // namespace operstokes
