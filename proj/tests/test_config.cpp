#include <rydsqz/config.hpp>
#include <rydsqz/dicke.hpp>

#include <gtest/gtest.h>

using namespace rydsqz;

namespace
{

std::string error_key(const std::function<void()>& f)
{
    try
    {
        f();
    }
    catch (const ConfigError& e)
    {
        return e.key();
    }
    return "";
}

} // namespace

TEST(Config, RenderParseRoundTrip)
{
    RunConfig c;
    c.mode = Mode::oracle;
    c.n_atoms = 5;
    c.delta_mhz = 1.0 / 3.0;
    c.delta_prime_mhz = 0.1;
    c.omega0_mhz = 0.01;
    c.u_int_mhz = 1e3;
    c.phase_convention = "-90/-90";
    c.output_path = "out/x";
    c.rng_seed = 42;
    EXPECT_EQ(parse_config(render(c)), c);

    RunConfig d; // infinite interaction, default mode
    EXPECT_EQ(parse_config(render(d)), d);
    EXPECT_NE(render(d).find("u_int_mhz = inf"), std::string::npos);
}

TEST(Config, CommentsAndWhitespace)
{
    const auto c = parse_config("# header\n  mode = loss  # trailing\n\nn_atoms=50\nn_lost = 5\n");
    EXPECT_EQ(c.mode, Mode::loss);
    EXPECT_EQ(c.n_atoms, 50);
    EXPECT_EQ(c.n_lost, 5);
}

TEST(Config, Errors)
{
    EXPECT_EQ(error_key([] { parse_config("bogus = 1\n"); }), "bogus");
    EXPECT_EQ(error_key([] { parse_config("n_atoms = 3\nn_atoms = 4\n"); }), "n_atoms");
    EXPECT_EQ(error_key([] { parse_config("n_atoms = -4\n"); }), "n_atoms");
    EXPECT_EQ(error_key([] { parse_config("n_atoms = 2.5\n"); }), "n_atoms");
    EXPECT_EQ(error_key([] { parse_config("delta_mhz = fifty\n"); }), "delta_mhz");
    EXPECT_EQ(error_key([] { parse_config("mode = nonsense\n"); }), "mode");
    EXPECT_EQ(error_key([] { parse_config("just some text\n"); }), "line 1");
    EXPECT_EQ(error_key([] { parse_config("frequency_unit = hertz\n"); }), "frequency_unit");
    EXPECT_EQ(error_key([] { parse_config("phase_convention = sideways\n"); }), "phase_convention");
    EXPECT_EQ(error_key([] { parse_config("delta_prime_mhz = 60\n"); }), "delta_prime_mhz");
    EXPECT_EQ(error_key([] { parse_config("mode = oracle\nn_atoms = 7\n"); }), "n_atoms");
    EXPECT_EQ(error_key([] { parse_config("mode = loss\nn_atoms = 10\nn_lost = 10\n"); }), "n_lost");
    EXPECT_EQ(error_key([] { parse_config("mode = feasibility\ndelta_prime_mhz = 50\n"); }), "delta_prime_mhz");
}

TEST(Config, IdealModeRequiresCoupling)
{
    EXPECT_EQ(error_key([] { parse_config("mode = ideal\nn_atoms = 10\n"); }), "omega_eff_mhz");
    EXPECT_EQ(error_key([] { parse_config("mode = ideal\nomega_eff_mhz = 0\n"); }), "omega_eff_mhz");
    EXPECT_EQ(parse_config("mode = ideal\nomega_eff_mhz = -0.5\n").omega_eff_mhz, -0.5);
    EXPECT_EQ(error_key([] { resolve_config(Mode::ideal, std::nullopt, {}); }), "omega_eff_mhz");
}

TEST(Config, Precedence)
{
    const std::string file = "n_atoms = 30\ndelta_mhz = 40\n";
    const auto a = resolve_config(Mode::fig3, file, {"delta_mhz=45"}).config;
    EXPECT_EQ(a.n_atoms, 30);           // file over default
    EXPECT_EQ(a.delta_mhz, 45.0);       // override over file
    EXPECT_EQ(a.delta_prime_mhz, 20.0); // default
    EXPECT_EQ(a.mode, Mode::fig3);

    const auto b = resolve_config(Mode::loss, std::nullopt, {"n_lost=3"});
    EXPECT_EQ(b.config.n_lost, 3);
    EXPECT_TRUE(b.explicit_keys.count("n_lost"));
    EXPECT_TRUE(b.explicit_keys.count("mode"));

    EXPECT_EQ(error_key([] { resolve_config(Mode::loss, std::string("mode = fig3\n"), {}); }), "mode");
    EXPECT_EQ(error_key([] { resolve_config(Mode::loss, std::nullopt, {"n_lost"}); }), "n_lost");
    EXPECT_EQ(error_key([] { resolve_config(Mode::loss, std::nullopt, {"n_lost=100"}); }), "n_lost");
}

TEST(Config, UnitsAndStem)
{
    RunConfig c;
    EXPECT_NEAR(c.angular(1.0), 2.0 * kPi, 1e-15);
    c.frequency_unit = "angular";
    EXPECT_EQ(c.angular(1.0), 1.0);
    EXPECT_EQ(c.output_stem(), "rydsqz_fig3");
    c.output_path = "dir/run";
    EXPECT_EQ(c.output_stem(), "dir/run");
}
