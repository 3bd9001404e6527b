#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "posner/acceptance.hpp"
#include "posner/estimates.hpp"
#include "posner/experiments.hpp"
#include "posner/machine.hpp"
#include "posner/spin_algebra.hpp"

namespace {

int run_cmd(const std::string& config_path, const std::string& output_path,
            const std::string& format) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    posner::ExperimentResult result = posner::run_experiment(text);
    const std::string payload = (format == "csv") ? result.to_csv() : result.to_json();
    if (output_path.empty()) {
        std::cout << payload << "\n";
    } else {
        std::ofstream out(output_path, std::ios::trunc);
        out << payload << "\n";
    }
    return result.all_pass() ? 0 : 3;
}

int script_cmd(const std::string& program_path, const std::string& output_path) {
    std::ifstream in(program_path);
    if (!in) {
        std::cerr << "cannot open program: " << program_path << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string trace = posner::run_script(text);
    if (output_path.empty()) {
        std::cout << trace << "\n";
    } else {
        std::ofstream out(output_path, std::ios::trunc);
        out << trace << "\n";
    }
    return 0;
}

int estimate_cmd(const std::string& kind, double B, double l, double eta, double r, double T) {
    nlohmann::json j;
    if (kind == "diffusion") {
        const posner::DiffusionResult d = posner::estimate_diffusion({T, eta, r, l});
        j["D_m2_per_s"] = d.diffusion_constant;
        j["D_order"] = posner::order_of_magnitude(d.diffusion_constant);
        j["t_diff_s"] = d.diffusion_time_s;
        j["t_diff_order"] = posner::order_of_magnitude(d.diffusion_time_s);
    } else if (kind == "rotation") {
        const double t = posner::estimate_rotation_time(B);
        j["t_rot_s"] = t;
        j["t_rot_order"] = posner::order_of_magnitude(t);
    } else {
        std::cerr << "estimate kind must be diffusion or rotation\n";
        return 2;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int tables_cmd() {
    std::cout << posner::trio_basis_csv() << "\n" << posner::charge_basis_csv();
    return 0;
}

int selftest_cmd() {
    bool all = true;
    for (const auto& c : posner::run_acceptance()) {
        std::cout << "criterion " << c.id << " [" << c.name << "]: "
                  << (c.pass ? "PASS" : "FAIL") << "  (" << c.detail << ")\n";
        all = all && c.pass;
    }
    std::cout << (all ? "acceptance: all criteria pass\n" : "acceptance: FAILURES present\n");
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Posner-molecule quantum information simulator"};
    app.require_subcommand(1);

    std::string config_path, output_path, format = "json", program_path, kind;
    double B = 1e-8, l = 1e-7, eta = 1e-3, r = 1e-9, T = 100.0;

    CLI::App* run = app.add_subcommand("run", "run a named experiment from a JSON config");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("-o,--output", output_path, "output file (stdout when omitted)");
    run->add_option("-f,--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* script = app.add_subcommand("script", "execute a machine program");
    script->add_option("program", program_path, "program JSON file")->required();
    script->add_option("-o,--output", output_path, "trace output file");

    CLI::App* est = app.add_subcommand("estimate", "closed-form physical estimates");
    est->add_option("kind", kind, "diffusion or rotation")->required();
    est->add_option("--B", B, "magnetic field, tesla");
    est->add_option("--l", l, "distance scale, meters");
    est->add_option("--eta", eta, "viscosity, Pa*s");
    est->add_option("--r", r, "molecule radius, meters");
    est->add_option("--T", T, "temperature, kelvin");

    app.add_subcommand("tables", "dump the trio and charge eigenbasis tables as CSV");
    app.add_subcommand("selftest", "run the full acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return run_cmd(config_path, output_path, format);
        if (script->parsed()) return script_cmd(program_path, output_path);
        if (est->parsed()) return estimate_cmd(kind, B, l, eta, r, T);
        if (app.get_subcommand("tables")->parsed()) return tables_cmd();
        if (app.get_subcommand("selftest")->parsed()) return selftest_cmd();
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
