#pragma once

// Symmetric (Dicke) state space of N three-level atoms {a, b, r}.
//
// A configuration is labelled by (n_a, n_r); the remaining n_b = N - n_a - n_r
// atoms sit in |b>. Flat indices are n_r-major with n_a ascending, so the
// ground manifold (n_r = 0) is the contiguous block [0, N].

#include "errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rydsqz
{

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using DenseOp = Eigen::MatrixXcd;
using Amplitudes = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

struct Configuration
{
    int n_a = 0;
    int n_r = 0;

    bool operator==(const Configuration&) const = default;
};

class DickeBasis
{
public:
    // max_rydberg is 0 or 1 for the squeezing models. The value 2 is only
    // used by the unblockaded single-laser light-shift run.
    DickeBasis(int n_atoms, int max_rydberg)
        : m_n_atoms(n_atoms), m_max_rydberg(max_rydberg)
    {
        if (n_atoms < 1)
            throw InvalidArgument("DickeBasis: n_atoms must be >= 1");
        if (max_rydberg < 0 || max_rydberg > 2)
            throw InvalidArgument("DickeBasis: max_rydberg must be 0, 1 or 2");

        const int top = std::min(max_rydberg, n_atoms);
        m_offsets.reserve(top + 2);
        std::size_t offset = 0;
        for (int nr = 0; nr <= top; ++nr)
        {
            m_offsets.push_back(offset);
            offset += static_cast<std::size_t>(n_atoms - nr + 1);
        }
        m_offsets.push_back(offset);
        m_dimension = offset;
    }

    int n_atoms() const { return m_n_atoms; }
    int max_rydberg() const { return m_max_rydberg; }
    std::size_t dimension() const { return m_dimension; }

    bool contains(int n_a, int n_r) const
    {
        return n_r >= 0 && n_r <= m_max_rydberg && n_a >= 0 && n_a + n_r <= m_n_atoms;
    }

    std::optional<std::size_t> find(int n_a, int n_r) const
    {
        if (!contains(n_a, n_r))
            return std::nullopt;
        return m_offsets[n_r] + static_cast<std::size_t>(n_a);
    }

    std::size_t index(int n_a, int n_r) const
    {
        auto idx = find(n_a, n_r);
        if (!idx)
            throw InvalidArgument("DickeBasis: configuration (" + std::to_string(n_a) + ", " +
                                  std::to_string(n_r) + ") outside basis");
        return *idx;
    }

    Configuration configuration(std::size_t index) const
    {
        if (index >= m_dimension)
            throw InvalidArgument("DickeBasis: index out of range");
        int nr = 0;
        while (index >= m_offsets[nr + 1])
            ++nr;
        return {static_cast<int>(index - m_offsets[nr]), nr};
    }

    int n_b(const Configuration& c) const { return m_n_atoms - c.n_a - c.n_r; }

    bool operator==(const DickeBasis& other) const
    {
        return m_n_atoms == other.m_n_atoms && m_max_rydberg == other.m_max_rydberg;
    }

private:
    int m_n_atoms;
    int m_max_rydberg;
    std::size_t m_dimension = 0;
    std::vector<std::size_t> m_offsets;
};

inline DickeBasis build_basis(int n_atoms, int max_rydberg)
{
    if (max_rydberg != 0 && max_rydberg != 1)
        throw InvalidArgument("build_basis: max_rydberg must be 0 or 1");
    return DickeBasis(n_atoms, max_rydberg);
}

enum class Level
{
    a,
    b,
    r
};

// Collective transition operator x^dagger y (moves one atom from y to x).
struct Ladder
{
    Level to;
    Level from;
};

namespace ladder
{
inline constexpr Ladder a_dag_b{Level::a, Level::b};
inline constexpr Ladder b_dag_a{Level::b, Level::a};
inline constexpr Ladder a_dag_r{Level::a, Level::r};
inline constexpr Ladder r_dag_a{Level::r, Level::a};
inline constexpr Ladder b_dag_r{Level::b, Level::r};
inline constexpr Ladder r_dag_b{Level::r, Level::b};
} // namespace ladder

namespace detail
{
inline int& occupation(int& na, int& nb, int& nr, Level l)
{
    switch (l)
    {
    case Level::a: return na;
    case Level::b: return nb;
    default: return nr;
    }
}
} // namespace detail

// Sparse matrix of x^dagger y in the Schwinger representation. Transitions
// leaving the truncated basis are dropped.
inline SparseOp ladder_action(const DickeBasis& basis, Ladder which)
{
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(basis.dimension());
    for (std::size_t col = 0; col < basis.dimension(); ++col)
    {
        const auto c = basis.configuration(col);
        int na = c.n_a, nr = c.n_r, nb = basis.n_b(c);
        if (which.to == which.from)
        {
            const int n = detail::occupation(na, nb, nr, which.to);
            if (n > 0)
                entries.emplace_back(col, col, static_cast<double>(n));
            continue;
        }
        int& n_from = detail::occupation(na, nb, nr, which.from);
        if (n_from == 0)
            continue;
        const double w_from = static_cast<double>(n_from);
        --n_from;
        int& n_to = detail::occupation(na, nb, nr, which.to);
        ++n_to;
        const double w_to = static_cast<double>(n_to);
        auto row = basis.find(na, nr);
        if (!row)
            continue;
        entries.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col),
                             std::sqrt(w_from * w_to));
    }
    SparseOp op(dim, dim);
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

inline SparseOp number_operator(const DickeBasis& basis, Level level)
{
    return ladder_action(basis, Ladder{level, level});
}

// J_theta = (e^{i theta} a^dag b + e^{-i theta} b^dag a) / 2
//         = cos(theta) J_x - sin(theta) J_y.
inline SparseOp spin_operator(const DickeBasis& basis, double theta)
{
    const cplx phase = std::polar(1.0, theta);
    SparseOp raise = ladder_action(basis, ladder::a_dag_b);
    SparseOp op = (0.5 * phase) * raise;
    SparseOp lower = SparseOp(raise.adjoint());
    op += (0.5 * std::conj(phase)) * lower;
    return op;
}

inline SparseOp spin_x(const DickeBasis& basis) { return spin_operator(basis, 0.0); }
inline SparseOp spin_y(const DickeBasis& basis) { return spin_operator(basis, -kPi / 2.0); }

inline SparseOp spin_z(const DickeBasis& basis)
{
    SparseOp op = number_operator(basis, Level::a) - number_operator(basis, Level::b);
    return 0.5 * op;
}

class DickeState
{
public:
    static constexpr double kDefaultNormTolerance = 1e-9;

    DickeState(DickeBasis basis, Amplitudes amplitudes,
               double norm_tolerance = kDefaultNormTolerance)
        : m_basis(std::move(basis)), m_amplitudes(std::move(amplitudes))
    {
        if (static_cast<std::size_t>(m_amplitudes.size()) != m_basis.dimension())
            throw InvalidArgument("DickeState: amplitude vector length does not match basis");
        if (std::abs(m_amplitudes.squaredNorm() - 1.0) > norm_tolerance)
            throw InvalidState("DickeState: amplitudes not normalized");
    }

    static DickeState fock(const DickeBasis& basis, int n_a, int n_r = 0)
    {
        Amplitudes amp = Amplitudes::Zero(static_cast<Eigen::Index>(basis.dimension()));
        amp[static_cast<Eigen::Index>(basis.index(n_a, n_r))] = 1.0;
        return DickeState(basis, std::move(amp));
    }

    // Coherent spin state with every atom in |a>.
    static DickeState all_in_a(const DickeBasis& basis) { return fock(basis, basis.n_atoms(), 0); }
    static DickeState all_in_b(const DickeBasis& basis) { return fock(basis, 0, 0); }

    // Normalizes an arbitrary nonzero vector.
    static DickeState normalized(const DickeBasis& basis, Amplitudes amplitudes)
    {
        const double n = amplitudes.norm();
        if (n == 0.0)
            throw InvalidState("DickeState: zero vector");
        amplitudes /= n;
        return DickeState(basis, std::move(amplitudes));
    }

    const DickeBasis& basis() const { return m_basis; }
    const Amplitudes& amplitudes() const { return m_amplitudes; }
    Amplitudes& amplitudes() { return m_amplitudes; }
    double norm() const { return m_amplitudes.norm(); }

    cplx amplitude(int n_a, int n_r = 0) const
    {
        return m_amplitudes[static_cast<Eigen::Index>(m_basis.index(n_a, n_r))];
    }

private:
    DickeBasis m_basis;
    Amplitudes m_amplitudes;
};

inline cplx expectation(const SparseOp& op, const Amplitudes& psi)
{
    return psi.dot(op * psi);
}

} // namespace rydsqz
