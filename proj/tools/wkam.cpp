#include <CLI11.hpp>
#include <iostream>

#include "wkam/lab.hpp"

int main(int argc, char** argv) {
    CLI::App app{"weak-KAM workbench"};
    app.require_subcommand(1);

    const char* kinds[] = {"solve",    "critical",       "mather",     "barrier", "limit",
                           "converge", "counterexample", "uniqueness", "shifted"};
    std::string config_path, out_dir;
    for (const char* kind : kinds) {
        auto* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "experiment config (json)")->required();
        sub->add_option("--out", out_dir, "output directory for report.json and CSVs");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto* sub = app.get_subcommands().front();
        wkam::ExperimentConfig cfg = wkam::load_config(config_path);
        cfg.kind = sub->get_name();  // subcommand wins over the config field
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        wkam::ExperimentReport rep = wkam::run_experiment(cfg);
        for (const auto& v : rep.verdicts)
            std::cout << (v.pass ? "pass  " : "FAIL  ") << v.name
                      << (v.note.empty() ? "" : "  (" + v.note + ")") << "\n";
        std::cout << rep.to_json()["summary"].dump(2) << "\n";
        return rep.all_pass() ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
