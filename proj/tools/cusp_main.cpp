#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cusp/errors.hpp"
#include "cusp/harness.hpp"

namespace {

using cusp::harness::json;

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cusp::DataError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw cusp::DataError("malformed config " + path + ": " + e.what());
    }
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON experiment config")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

json effective_config(const CommonArgs& args) {
    json cfg = load_config(args.config_path);
    if (args.seed_given) cfg["seed"] = args.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CUSP surrogate-pattern uncertainty experiments"};
    app.require_subcommand(1);

    CommonArgs args;
    json (*runner)(const json&, const std::string&) = nullptr;

    auto register_cmd = [&](const std::string& name, const std::string& desc,
                            json (*fn)(const json&, const std::string&)) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, args);
        cmd->callback([&runner, fn]() { runner = fn; });
    };

    register_cmd("train", "train a surrogate-pattern classifier",
                 cusp::harness::cmd_train);
    register_cmd("eval-ood", "out-of-distribution detection evaluation",
                 cusp::harness::cmd_eval_ood);
    register_cmd("eval-flip", "flipped-label sensitivity experiment",
                 cusp::harness::cmd_eval_flip);
    register_cmd("eval-adv", "adversarial robustness accuracy-vs-epsilon table",
                 cusp::harness::cmd_eval_adv);
    register_cmd("eval-detector", "10:1:1 secondary-detector protocol",
                 cusp::harness::cmd_eval_detector);
    register_cmd("dump-patterns", "write target/reconstruction PGM images",
                 cusp::harness::cmd_dump_patterns);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message; exit code is ours
        return 1;
    }

    try {
        const json report = runner(effective_config(args), args.out_dir);
        std::cout << report.dump(2) << std::endl;
        return 0;
    } catch (const cusp::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << std::endl;
        return 3;
    } catch (const cusp::DataError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return 2;
    } catch (const cusp::UsageError& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
