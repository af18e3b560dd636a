#include <rydsqz/dicke.hpp>
#include <rydsqz/ideal_model.hpp>
#include <rydsqz/observables.hpp>

#include "oracles/tensor_space.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rydsqz;

namespace
{

DenseOp dense(const SparseOp& s) { return DenseOp(s); }

double max_abs(const DenseOp& m) { return m.cwiseAbs().maxCoeff(); }

// Random normalized state in a basis, from a fixed seed.
DickeState random_state(const DickeBasis& basis, std::mt19937& rng)
{
    std::normal_distribution<double> g;
    Amplitudes v(static_cast<Eigen::Index>(basis.dimension()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = cplx(g(rng), g(rng));
    return DickeState::normalized(basis, v);
}

} // namespace

TEST(DickeBasis, Dimensions)
{
    const auto b1 = build_basis(1, 1);
    ASSERT_EQ(b1.dimension(), 3u);
    EXPECT_EQ(b1.configuration(0), (Configuration{0, 0}));
    EXPECT_EQ(b1.configuration(1), (Configuration{1, 0}));
    EXPECT_EQ(b1.configuration(2), (Configuration{0, 1}));
    EXPECT_EQ(build_basis(20, 1).dimension(), 41u);
    EXPECT_EQ(build_basis(20, 0).dimension(), 21u);
}

TEST(DickeBasis, IndexMapIsBijective)
{
    for (int n : {1, 2, 5, 20})
        for (int r : {0, 1})
        {
            const auto b = build_basis(n, r);
            EXPECT_EQ(b.dimension(), static_cast<std::size_t>((n + 1) + n * r));
            for (std::size_t i = 0; i < b.dimension(); ++i)
            {
                const auto c = b.configuration(i);
                EXPECT_EQ(b.index(c.n_a, c.n_r), i);
                EXPECT_GE(b.n_b(c), 0);
            }
        }
}

TEST(DickeBasis, RejectsBadArguments)
{
    EXPECT_THROW(build_basis(0, 1), InvalidArgument);
    EXPECT_THROW(build_basis(-3, 0), InvalidArgument);
    EXPECT_THROW(build_basis(4, 2), InvalidArgument);
    EXPECT_THROW(build_basis(4, 1).index(4, 1), InvalidArgument);
}

TEST(LadderAction, MatrixElements)
{
    const auto b2 = build_basis(2, 0);
    const DenseOp up = dense(ladder_action(b2, ladder::a_dag_b));
    EXPECT_NEAR(std::abs(up(b2.index(1, 0), b2.index(0, 0)) - std::sqrt(2.0)), 0.0, 1e-15);

    const int n = 7;
    const auto b = build_basis(n, 1);
    const DenseOp ra = dense(ladder_action(b, ladder::r_dag_a));
    EXPECT_NEAR(ra(b.index(n - 1, 1), b.index(n, 0)).real(), std::sqrt(static_cast<double>(n)), 1e-14);

    // blockade: nothing leaves the n_r = 1 sector upwards
    for (int na = 0; na <= n - 1; ++na)
    {
        Amplitudes v = Amplitudes::Zero(static_cast<Eigen::Index>(b.dimension()));
        v[static_cast<Eigen::Index>(b.index(na, 1))] = 1.0;
        EXPECT_EQ((ladder_action(b, ladder::r_dag_a) * v).norm(), 0.0);
        EXPECT_EQ((ladder_action(b, ladder::r_dag_b) * v).norm(), 0.0);
    }
}

TEST(SpinOperator, SingleSpinAndPhaseIdentity)
{
    const auto b = build_basis(1, 0);
    Eigen::SelfAdjointEigenSolver<DenseOp> es(dense(spin_x(b)));
    EXPECT_NEAR(es.eigenvalues()[0], -0.5, 1e-15);
    EXPECT_NEAR(es.eigenvalues()[1], 0.5, 1e-15);

    const auto b5 = build_basis(5, 1);
    for (double th : {0.0, 0.3, -kPi / 4, 2.0})
        EXPECT_LT(max_abs(dense(spin_operator(b5, th)) + dense(spin_operator(b5, th + kPi))), 1e-14);

    const auto bn = build_basis(9, 0);
    EXPECT_NEAR(expectation(spin_z(bn), DickeState::all_in_a(bn).amplitudes()).real(), 4.5, 1e-14);
}

TEST(SpinOperator, HermitianAndSectorPreserving)
{
    for (int n = 1; n <= 6; ++n)
    {
        const auto b = build_basis(n, 1);
        for (double th : {0.0, 0.7, -kPi / 4})
        {
            const DenseOp j = dense(spin_operator(b, th));
            EXPECT_LT(max_abs(j - j.adjoint()), 1e-15);
            for (std::size_t r = 0; r < b.dimension(); ++r)
                for (std::size_t c = 0; c < b.dimension(); ++c)
                    if (std::abs(j(r, c)) > 0)
                        EXPECT_EQ(b.configuration(r).n_r, b.configuration(c).n_r);
        }
        for (auto l : {ladder::a_dag_r, ladder::b_dag_r})
        {
            const DenseOp h = dense(ladder_action(b, l)) + dense(ladder_action(b, l)).adjoint();
            EXPECT_LT(max_abs(h - h.adjoint()), 1e-15);
        }
    }
}

TEST(SpinAlgebra, CommutatorAndCasimir)
{
    for (int n = 1; n <= 6; ++n)
    {
        const auto b = build_basis(n, 0);
        const DenseOp jx = dense(spin_x(b)), jy = dense(spin_y(b)), jz = dense(spin_z(b));
        EXPECT_LT(max_abs(jx * jy - jy * jx - cplx(0, 1) * jz), 1e-13) << "N=" << n;
        EXPECT_LT(max_abs(jy * jz - jz * jy - cplx(0, 1) * jx), 1e-13) << "N=" << n;
        const double j = n / 2.0;
        const DenseOp cas = jx * jx + jy * jy + jz * jz;
        EXPECT_LT(max_abs(cas - j * (j + 1) * DenseOp::Identity(cas.rows(), cas.cols())), 1e-12) << "N=" << n;
    }
}

// Symmetric-subspace projection of the 3^N tensor construction.
TEST(BruteForce, OperatorsMatchTensorProjection)
{
    const std::pair<Ladder, std::pair<int, int>> ops[] = {
        {ladder::a_dag_b, {0, 1}}, {ladder::b_dag_a, {1, 0}}, {ladder::a_dag_r, {0, 2}},
        {ladder::r_dag_a, {2, 0}}, {ladder::b_dag_r, {1, 2}}, {ladder::r_dag_b, {2, 1}},
    };
    for (int n = 1; n <= 4; ++n)
    {
        const oracle::TensorSpace space(n, 3);
        for (int max_r : {0, 1})
        {
            const auto b = build_basis(n, max_r);
            const oracle::Mat v = space.symmetric_isometry(max_r);
            const oracle::Mat cap = space.rydberg_cap(max_r);
            for (const auto& [l, pair] : ops)
            {
                const oracle::Mat full = cap * space.collective(pair.first, pair.second) * cap;
                const DenseOp projected = v.adjoint() * full * v;
                EXPECT_LT(max_abs(projected - dense(ladder_action(b, l))), 1e-13)
                    << "N=" << n << " max_r=" << max_r;
            }
            for (double th : {0.0, -kPi / 2, -kPi / 4, 1.1})
            {
                const DenseOp projected = v.adjoint() * space.spin(th) * v;
                EXPECT_LT(max_abs(projected - dense(spin_operator(b, th))), 1e-13);
            }
            const DenseOp pz = v.adjoint() * space.spin_z() * v;
            EXPECT_LT(max_abs(pz - dense(spin_z(b))), 1e-13);
            // the symmetric subspace is invariant under the collective operators
            const oracle::Mat proj = v * v.adjoint();
            const oracle::Mat up = cap * space.collective(2, 0) * cap;
            EXPECT_LT(max_abs(proj * up * proj - up * proj), 1e-13);
        }
    }
}

TEST(Observables, CoherentStates)
{
    const auto b = build_basis(20, 1);
    const auto o = observables(DickeState::all_in_a(b));
    EXPECT_NEAR(o.mean_spin[0], 0.0, 1e-14);
    EXPECT_NEAR(o.mean_spin[1], 0.0, 1e-14);
    EXPECT_NEAR(o.mean_spin[2], 10.0, 1e-13);
    EXPECT_NEAR(o.variance_at(-kPi / 4), 5.0, 1e-12);
    for (double th = 0; th < kPi; th += 0.1)
        EXPECT_NEAR(o.variance_at(th), 5.0, 1e-12);
    EXPECT_NEAR(observables(DickeState::all_in_b(b)).mean_spin[2], -10.0, 1e-13);

    const auto b1 = build_basis(1, 0);
    Amplitudes v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto o1 = observables(DickeState(b1, v));
    EXPECT_NEAR(o1.mean_spin[0], 0.5, 1e-15);
    EXPECT_NEAR(o1.mean_spin[1], 0.0, 1e-15);
    EXPECT_NEAR(o1.mean_spin[2], 0.0, 1e-15);

    const auto m = squeezing(DickeState::all_in_a(build_basis(13, 0)));
    EXPECT_NEAR(m.s_factor, 1.0, 1e-12);
}

TEST(Observables, RydbergPopulation)
{
    const auto b = build_basis(4, 1);
    Amplitudes v = Amplitudes::Zero(static_cast<Eigen::Index>(b.dimension()));
    v[static_cast<Eigen::Index>(b.index(4, 0))] = std::sqrt(0.75);
    v[static_cast<Eigen::Index>(b.index(3, 1))] = std::sqrt(0.25);
    const auto o = observables(DickeState(b, v));
    EXPECT_NEAR(o.rydberg_population, 0.25, 1e-15);
    EXPECT_NEAR(o.n_a_mean + o.n_b_mean + o.rydberg_population, 4.0, 1e-14);
}

TEST(Observables, RejectsUnnormalizedInput)
{
    const auto b = build_basis(3, 0);
    EXPECT_THROW(DickeState(b, Amplitudes::Zero(4)), InvalidState);
    EXPECT_THROW(DickeState(b, Amplitudes::Ones(3)), InvalidArgument);
    Amplitudes v = Amplitudes::Zero(4);
    v[0] = 1.0 + 1e-5;
    const SpinMeter meter(b);
    EXPECT_THROW(meter.measure(v), InvalidState);
}

TEST(Squeezing, ClosedFormAxisMatchesScan)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial)
    {
        const int n = 2 + trial % 7;
        const auto b = build_basis(n, trial % 2);
        const auto o = observables(random_state(b, rng));
        const auto m = squeezing(o);
        double best = 1e300;
        for (int k = 0; k < 20000; ++k)
            best = std::min(best, o.variance_at(kPi * k / 20000.0));
        EXPECT_NEAR(m.variance_min, best, 1e-6 * n);
        EXPECT_NEAR(o.variance_at(m.theta_min), m.variance_min, 1e-10 * n);
        EXPECT_GE(m.theta_min, 0.0);
        EXPECT_LT(m.theta_min, kPi);
        EXPECT_LE(m.variance_min, m.variance_axis + 1e-12);
        EXPECT_NEAR(m.s_factor, (n / 4.0) / o.variance_at(-kPi / 4), 1e-12 * m.s_factor);
    }
}

TEST(Squeezing, VarianceIsPiPeriodic)
{
    std::mt19937 rng(11);
    const auto b = build_basis(2, 0);
    const auto o = observables(random_state(b, rng));
    for (double th : {-1.0, 0.0, 0.4, 2.5})
        EXPECT_NEAR(o.variance_at(th), o.variance_at(th + kPi), 1e-14);
}

TEST(Squeezing, ShortTwistGivesAxisMinusPiOverFour)
{
    IdealConfig c;
    c.n_atoms = 10;
    c.omega_eff = 1.0;
    c.t_final = 0.01;
    c.n_steps = 10;
    c.substeps_per_sample = 10;
    const auto trace = evolve_ideal(c, DickeState::all_in_a(build_basis(10, 0)));
    const auto& last = trace.rows.back();
    EXPECT_GT(last.s_factor, 1.0);
    // -pi/4 is 3 pi / 4 in [0, pi)
    EXPECT_NEAR(last.theta_min, 0.75 * kPi, 1e-6);
}

TEST(Squeezing, InfiniteFlagForZeroVariance)
{
    // an eigenstate of J_{-pi/4} has zero variance on that axis
    const auto b = build_basis(1, 0);
    Eigen::SelfAdjointEigenSolver<DenseOp> es(dense(spin_operator(b, -kPi / 4)));
    const auto m = squeezing(DickeState(b, es.eigenvectors().col(0)));
    EXPECT_TRUE(m.infinite);
    EXPECT_TRUE(std::isinf(m.s_factor));
}

// Heisenberg bound on random states of every basis used in the suite.
TEST(Property, HeisenbergBound)
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 200; ++trial)
    {
        const int n = 1 + trial % 12;
        const auto b = build_basis(n, trial % 2);
        const auto st = random_state(b, rng);
        const auto o = observables(st);
        const double th = std::uniform_real_distribution<double>(0, kPi)(rng);
        // J_theta and J_{theta + pi/2} have commutator i J_z on each sector
        const double lhs = o.variance_at(th) * o.variance_at(th + kPi / 2);
        EXPECT_GE(lhs + 1e-12, 0.25 * o.mean_spin[2] * o.mean_spin[2]) << "trial " << trial;
    }
}
