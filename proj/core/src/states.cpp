#include "trideph/states.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace trideph {

namespace {

CVector basis8() { return CVector::Zero(8); }

void check_p(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("NamedState: p must be in [0, 1]");
}

} // namespace

bool is_pure_family(StateFamily family) {
    switch (family) {
    case StateFamily::ghz:
    case StateFamily::w:
    case StateFamily::wbar:
    case StateFamily::wwbar:
    case StateFamily::star:
        return true;
    default:
        return false;
    }
}

NamedState parse_named_state(std::string_view token) {
    std::string_view name = token;
    double p = 1.0;
    bool has_p = false;
    if (const auto colon = token.find(':'); colon != std::string_view::npos) {
        name = token.substr(0, colon);
        const std::string_view ptext = token.substr(colon + 1);
        const auto res = std::from_chars(ptext.data(), ptext.data() + ptext.size(), p);
        if (res.ec != std::errc{} || res.ptr != ptext.data() + ptext.size())
            throw std::invalid_argument("state: cannot parse mixing probability in '" +
                                        std::string(token) + "'");
        has_p = true;
    }

    NamedState out;
    if (name == "ghz")
        out.family = StateFamily::ghz;
    else if (name == "w")
        out.family = StateFamily::w;
    else if (name == "wbar")
        out.family = StateFamily::wbar;
    else if (name == "wwbar")
        out.family = StateFamily::wwbar;
    else if (name == "star")
        out.family = StateFamily::star;
    else if (name == "werner-ghz")
        out.family = StateFamily::werner_ghz;
    else if (name == "werner-w")
        out.family = StateFamily::werner_w;
    else if (name == "ghzw")
        out.family = StateFamily::ghz_w_mix;
    else
        throw std::invalid_argument("state: unknown state '" + std::string(token) + "'");

    if (is_pure_family(out.family)) {
        if (has_p)
            throw std::invalid_argument("state: '" + std::string(name) +
                                        "' does not take a mixing probability");
    } else {
        if (!has_p)
            throw std::invalid_argument("state: '" + std::string(name) +
                                        "' needs a mixing probability, e.g. " +
                                        std::string(name) + ":0.5");
        check_p(p);
        out.p = p;
    }
    return out;
}

std::string to_string(const NamedState& state) {
    auto with_p = [&](const char* name) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%s:%.12g", name, state.p);
        return std::string(buf);
    };
    switch (state.family) {
    case StateFamily::ghz: return "ghz";
    case StateFamily::w: return "w";
    case StateFamily::wbar: return "wbar";
    case StateFamily::wwbar: return "wwbar";
    case StateFamily::star: return "star";
    case StateFamily::werner_ghz: return with_p("werner-ghz");
    case StateFamily::werner_w: return with_p("werner-w");
    case StateFamily::ghz_w_mix: return with_p("ghzw");
    }
    throw std::logic_error("to_string: bad StateFamily");
}

StateVector make_state_vector(StateFamily family) {
    CVector a = basis8();
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s3 = 1.0 / std::sqrt(3.0);
    const double s6 = 1.0 / std::sqrt(6.0);
    switch (family) {
    case StateFamily::ghz:
        a(0) = s2; // |000>
        a(7) = s2; // |111>
        break;
    case StateFamily::w:
        a(1) = s3; // |001>
        a(2) = s3; // |010>
        a(4) = s3; // |100>
        break;
    case StateFamily::wbar:
        a(6) = s3; // |110>
        a(5) = s3; // |101>
        a(3) = s3; // |011>
        break;
    case StateFamily::wwbar:
        a(1) = s6;
        a(2) = s6;
        a(4) = s6;
        a(3) = s6;
        a(5) = s6;
        a(6) = s6;
        break;
    case StateFamily::star:
        a(0) = 0.5; // |000>
        a(4) = 0.5; // |100>
        a(5) = 0.5; // |101>
        a(7) = 0.5; // |111>
        break;
    default:
        throw std::invalid_argument("make_state_vector: family is not a pure state");
    }
    return StateVector(std::move(a));
}

DensityMatrix make_state(const NamedState& state) {
    check_p(state.p);
    switch (state.family) {
    case StateFamily::werner_ghz:
    case StateFamily::werner_w: {
        const auto base = state.family == StateFamily::werner_ghz ? StateFamily::ghz
                                                                  : StateFamily::w;
        const CVector psi = make_state_vector(base).amplitudes();
        CMatrix m = state.p * (psi * psi.adjoint());
        m += ((1.0 - state.p) / 8.0) * CMatrix::Identity(8, 8);
        return DensityMatrix(std::move(m));
    }
    case StateFamily::ghz_w_mix: {
        const CVector g = make_state_vector(StateFamily::ghz).amplitudes();
        const CVector w = make_state_vector(StateFamily::w).amplitudes();
        CMatrix m = state.p * (g * g.adjoint()) + (1.0 - state.p) * (w * w.adjoint());
        return DensityMatrix(std::move(m));
    }
    default:
        return DensityMatrix::pure(make_state_vector(state.family));
    }
}

double concurrence(const DensityMatrix& rho2) {
    if (rho2.dim() != 4)
        throw std::invalid_argument("concurrence: needs a two-qubit state");
    // sy x sy in the computational basis: antidiagonal (-1, 1, 1, -1).
    CMatrix yy = CMatrix::Zero(4, 4);
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;

    // The Wootters lambdas (square-rooted eigenvalues of rho
    // (sy x sy) rho* (sy x sy)) are the singular values of
    // A = sqrt(rho) (sy x sy) conj(sqrt(rho)), since
    // sqrt(rho) rho~ sqrt(rho) = A A^dag.  The SVD route avoids the
    // sqrt-of-noise blowup at the zero eigenvalues of the non-Hermitian
    // product.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho2.matrix());
    const double top = es.eigenvalues().maxCoeff();
    CVector root = CVector::Zero(4);
    for (int i = 0; i < 4; ++i) {
        const double mu = es.eigenvalues()(i);
        root(i) = mu > 1e-14 * std::max(top, 1.0) ? std::sqrt(mu) : 0.0;
    }
    const CMatrix sqrt_rho = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
    const CMatrix a = sqrt_rho * yy * sqrt_rho.conjugate();
    const Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues(); // descending
    return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

double three_tangle_pure(const StateVector& psi) {
    if (psi.dim() != 8)
        throw std::invalid_argument("three_tangle_pure: needs a three-qubit state");
    const CVector& a = psi.amplitudes();
    // Indices: a[4*b1 + 2*b2 + b3].
    const cplx a000 = a(0), a001 = a(1), a010 = a(2), a011 = a(3);
    const cplx a100 = a(4), a101 = a(5), a110 = a(6), a111 = a(7);

    const cplx d1 = a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 +
                    a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011;
    const cplx d2 = a000 * a111 * a011 * a100 + a000 * a111 * a101 * a010 +
                    a000 * a111 * a110 * a001 + a011 * a100 * a101 * a010 +
                    a011 * a100 * a110 * a001 + a101 * a010 * a110 * a001;
    const cplx d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;

    return 4.0 * std::abs(d1 - 2.0 * d2 + 4.0 * d3);
}

} // namespace trideph
