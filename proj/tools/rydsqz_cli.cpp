// Command-line driver: one subcommand per run mode plus trace comparison.
//
//   rydsqz fig3 --set n_atoms=20 --set output_path=out/fig3
//   rydsqz ideal --config ideal.cfg
//   rydsqz compare a.csv b.csv --window 0 50
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <rydsqz/rydsqz.hpp>

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

int run_mode(rydsqz::Mode mode, const std::string& config_path, const std::vector<std::string>& overrides,
             bool print_config)
{
    rydsqz::ParsedConfig parsed;
    try
    {
        std::optional<std::string> text;
        if (!config_path.empty())
            text = rydsqz::read_text_file(config_path);
        parsed = rydsqz::resolve_config(mode, text, overrides);
    }
    catch (const rydsqz::Error& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    if (print_config)
    {
        std::cout << rydsqz::render(parsed.config);
        return 0;
    }
    try
    {
        const auto outcome = rydsqz::run(parsed.config);
        outcome.summary.write(std::cout);
        for (const auto& f : outcome.files)
            std::cerr << "wrote " << f << '\n';
    }
    catch (const rydsqz::InvalidArgument& e)
    {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfigError;
    }
    catch (const std::exception& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return 0;
}

int run_compare(const std::string& a, const std::string& b, const std::vector<double>& window)
{
    try
    {
        const auto ta = rydsqz::read_trace_csv(a);
        const auto tb = rydsqz::read_trace_csv(b);
        double begin = ta.rows.front().t, end = ta.rows.back().t;
        if (window.size() == 2)
        {
            begin = window[0];
            end = window[1];
        }
        const auto d = rydsqz::compare_traces(ta, tb, begin, end);
        std::cout << "window_begin = " << rydsqz::format_double(d.window_begin) << '\n'
                  << "window_end = " << rydsqz::format_double(d.window_end) << '\n'
                  << "n_points = " << d.n_points << '\n'
                  << "max_relative = " << rydsqz::format_double(d.max_relative) << '\n'
                  << "mean_relative = " << rydsqz::format_double(d.mean_relative) << '\n';
    }
    catch (const rydsqz::Error& e)
    {
        std::cerr << "compare: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rydberg-blockade spin squeezing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool print_config = false;
    int status = 0;

    const std::pair<rydsqz::Mode, const char*> modes[] = {
        {rydsqz::Mode::ideal, "Quadratic spin Hamiltonian against its analytic curves"},
        {rydsqz::Mode::blockade, "Blockaded ensemble under the multi-laser drive"},
        {rydsqz::Mode::oracle, "Exact few-atom checks of light shifts and the pair coupling"},
        {rydsqz::Mode::loss, "Squeezing after atom losses"},
        {rydsqz::Mode::feasibility, "Adiabaticity, timing and blockade-volume estimates"},
        {rydsqz::Mode::fig3, "Six-laser run of 20 atoms with its quadratic-Hamiltonian reference"},
    };
    for (const auto& [mode, help] : modes)
    {
        auto* sub = app.add_subcommand(rydsqz::to_string(mode), help);
        sub->add_option("-c,--config", config_path, "key = value configuration file");
        sub->add_option("-s,--set", overrides, "override, key=value (repeatable)");
        sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
        sub->callback([&, mode = mode] { status = run_mode(mode, config_path, overrides, print_config); });
    }

    std::string trace_a, trace_b;
    std::vector<double> window;
    auto* cmp = app.add_subcommand("compare", "Relative deviation of S between two traces");
    cmp->add_option("a", trace_a, "trace")->required();
    cmp->add_option("b", trace_b, "reference trace")->required();
    cmp->add_option("-w,--window", window, "time window (begin end)")->expected(2);
    cmp->callback([&] { status = run_compare(trace_a, trace_b, window); });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    return status;
}
