// Copyright 2026 The nulllab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, exact, validate, list.
//
// Exit codes: 0 success, 1 statistical check failed, 2 usage error,
// 3 parse or semantic error, 4 I/O error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "nulllab/nulllab.hpp"

namespace {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kInvalidScenario = 3, kIoError = 4 };

struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Failure{kIoError, "cannot read '" + path + "'"};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Prints diagnostics and returns false when `source` is not a valid scenario.
bool report_diagnostics(const std::string &path, const std::string &source, std::ostream &out,
                        std::optional<nulllab::dsl::ScenarioDoc> &doc) {
    auto parsed = nulllab::dsl::parse(source);
    if (!parsed.ok()) {
        for (const auto &e : parsed.errors) {
            out << path << ":" << e.to_string() << "\n";
        }
        return false;
    }
    auto errors = nulllab::dsl::validate(*parsed.doc);
    for (const auto &e : errors) {
        out << path << ":" << e.to_string() << "\n";
    }
    if (!errors.empty()) {
        return false;
    }
    doc = std::move(parsed.doc);
    return true;
}

nulllab::Scenario load_scenario(const std::string &source_id) {
    if (auto builtin = nulllab::make_builtin(source_id)) {
        return *builtin;
    }
    namespace fs = std::filesystem;
    if (!fs::exists(source_id)) {
        if (source_id.find('/') == std::string::npos && !source_id.ends_with(".scn")) {
            throw Failure{kUsage, "unknown scenario '" + source_id + "' (see 'nulllab list')"};
        }
        throw Failure{kIoError, "cannot read '" + source_id + "'"};
    }
    std::string text = read_file(source_id);
    std::optional<nulllab::dsl::ScenarioDoc> doc;
    if (!report_diagnostics(source_id, text, std::cerr, doc)) {
        throw Failure{kInvalidScenario, "'" + source_id + "' is not a valid scenario"};
    }
    try {
        auto lowered = nulllab::dsl::lower(*doc, fs::path(source_id).stem().string());
        for (const auto &w : lowered.warnings) {
            std::cerr << source_id << ": warning: " << w << "\n";
        }
        return std::move(lowered.scenario);
    } catch (const nulllab::Error &e) {
        throw Failure{kInvalidScenario, e.what()};
    }
}

class Output {
   public:
    explicit Output(const std::string &path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw Failure{kIoError, "cannot write '" + path + "'"};
            }
        }
    }
    std::ostream &stream() { return file_.is_open() ? static_cast<std::ostream &>(file_) : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) {
            throw Failure{kIoError, "write failed"};
        }
    }

   private:
    std::ofstream file_;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
    if (flag) {
        return *flag;
    }
    if (const char *env = std::getenv("NULLLAB_SEED")) {
        try {
            std::size_t used = 0;
            std::string text(env);
            auto value = std::stoull(text, &used, 0);
            if (used != text.size()) {
                throw std::invalid_argument("trailing characters");
            }
            return value;
        } catch (const std::exception &) {
            throw Failure{kUsage, "NULLLAB_SEED is not an unsigned integer"};
        }
    }
    return 42;
}

struct RunOptions {
    std::string scenario;
    std::uint64_t trials = 100'000;
    std::optional<std::uint64_t> seed;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string format = "json";
    std::string out;
    double sigma = 3.0;
    double alpha = 0.001;
    std::string records;
};

int cmd_run(const RunOptions &opt) {
    const auto scenario = load_scenario(opt.scenario);
    const auto laws = nulllab::uniform_click_laws(scenario);
    std::vector<std::vector<std::uint64_t>> histograms(laws.size());
    for (std::size_t k = 0; k < laws.size(); ++k) {
        histograms[k].assign(laws[k].labels.size(), 0);
    }

    std::ofstream records;
    if (!opt.records.empty()) {
        records.open(opt.records, std::ios::binary);
        if (!records) {
            throw Failure{kIoError, "cannot write '" + opt.records + "'"};
        }
        records << nulllab::records_csv_header();
    }

    nulllab::RunConfig cfg;
    cfg.trials = opt.trials;
    cfg.master_seed = resolve_seed(opt.seed);
    cfg.workers = opt.workers;
    cfg.keep_records = false;
    if (!laws.empty() || records.is_open()) {
        cfg.record_sink = [&](std::span<const nulllab::TrialRecord> batch) {
            for (std::size_t k = 0; k < laws.size(); ++k) {
                auto h = nulllab::click_histogram(batch, laws[k].detector, laws[k].labels);
                for (std::size_t b = 0; b < h.size(); ++b) {
                    histograms[k][b] += h[b];
                }
            }
            if (records.is_open()) {
                records << nulllab::records_to_csv(batch);
            }
        };
    }
    auto result = nulllab::run(scenario, cfg);
    if (records.is_open() && !records.flush()) {
        throw Failure{kIoError, "write to '" + opt.records + "' failed"};
    }

    Output out(opt.out);
    if (opt.format == "csv") {
        out.stream() << nulllab::table_to_csv(result.table);
    } else {
        out.stream() << nulllab::table_to_json(result.table).dump(2) << "\n";
    }
    out.finish();

    auto verdicts = nulllab::compare(result.table, opt.sigma);
    bool ok = nulllab::all_pass(verdicts);
    std::cerr << "scenario " << result.table.scenario << ", " << result.table.total_trials << " trials, seed "
              << result.table.master_seed << "\n";
    std::cerr << std::left << std::setw(18) << "class" << std::right << std::setw(10) << "count" << std::setw(12)
              << "freq" << std::setw(12) << "exact" << std::setw(10) << "z"
              << "  verdict\n";
    for (std::size_t k = 0; k < result.table.rows.size(); ++k) {
        const auto &row = result.table.rows[k];
        std::cerr << std::left << std::setw(18) << row.name << std::right << std::setw(10) << row.count
                  << std::setw(12) << std::setprecision(6) << row.frequency << std::setw(12) << row.exact
                  << std::setw(10) << std::setprecision(3) << row.z_score << "  "
                  << (verdicts[k].pass ? "pass" : "FAIL") << "\n";
    }
    for (std::size_t k = 0; k < laws.size(); ++k) {
        std::uint64_t total = 0;
        for (auto c : histograms[k]) {
            total += c;
        }
        if (total == 0) {
            continue;
        }
        auto chi = nulllab::chi_square_uniform(histograms[k]);
        double critical = nulllab::chi_square_critical(chi.degrees, opt.alpha);
        bool pass = chi.statistic <= critical;
        ok = ok && pass;
        std::cerr << "uniformity of " << laws[k].detector << " clicks: chi2 = " << std::setprecision(6) << chi.statistic
                  << " on " << chi.degrees << " dof, critical " << critical << " at " << opt.alpha << "  "
                  << (pass ? "pass" : "FAIL") << "\n";
    }
    return ok ? kOk : kCheckFailed;
}

int cmd_exact(const std::string &id, const std::string &format, const std::string &path) {
    const auto scenario = load_scenario(id);
    Output out(path);
    if (format == "csv") {
        out.stream() << "class,exact\n";
        for (const auto &[name, p] : nulllab::exact_distribution(scenario)) {
            out.stream() << nulllab::csv_field(name) << "," << nulllab::format_double(p) << "\n";
        }
    } else {
        out.stream() << nulllab::distribution_to_json(scenario).dump(2) << "\n";
    }
    out.finish();
    return kOk;
}

int cmd_validate(const std::string &path) {
    std::string text = read_file(path);
    std::optional<nulllab::dsl::ScenarioDoc> doc;
    if (!report_diagnostics(path, text, std::cout, doc)) {
        return kInvalidScenario;
    }
    try {
        auto lowered = nulllab::dsl::lower(*doc, std::filesystem::path(path).stem().string());
        for (const auto &w : lowered.warnings) {
            std::cout << path << ": warning: " << w << "\n";
        }
    } catch (const nulllab::Error &e) {
        std::cout << path << ": error: " << e.what() << "\n";
        return kInvalidScenario;
    }
    std::cout << path << ": ok\n";
    return kOk;
}

int cmd_list() {
    for (const auto &b : nulllab::builtin_scenarios()) {
        std::cout << std::left << std::setw(16) << b.id << b.description << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Monte-Carlo and exact simulation of measurements with biased detectors"};
    app.require_subcommand(1);

    RunOptions run;
    auto *run_cmd = app.add_subcommand("run", "sample trials and compare frequencies with the exact law");
    run_cmd->add_option("scenario", run.scenario, "built-in id or .scn file")->required();
    run_cmd->add_option("--trials", run.trials, "number of trials")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", run.seed, "master seed (falls back to NULLLAB_SEED, then 42)");
    run_cmd->add_option("--workers", run.workers, "worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--format", run.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    run_cmd->add_option("--out", run.out, "write the table here instead of standard output");
    run_cmd->add_option("--sigma", run.sigma, "binomial acceptance width")->check(CLI::PositiveNumber);
    run_cmd->add_option("--alpha", run.alpha, "chi-square significance level")->check(CLI::Range(1e-12, 0.5));
    run_cmd->add_option("--records", run.records, "dump every trial record as CSV to this path");

    std::string exact_id;
    std::string exact_format = "json";
    std::string exact_out;
    auto *exact_cmd = app.add_subcommand("exact", "print the exact outcome distribution");
    exact_cmd->add_option("scenario", exact_id, "built-in id or .scn file")->required();
    exact_cmd->add_option("--format", exact_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    exact_cmd->add_option("--out", exact_out, "write here instead of standard output");

    std::string validate_path;
    auto *validate_cmd = app.add_subcommand("validate", "check a scenario file");
    validate_cmd->add_option("file", validate_path, ".scn file")->required();

    auto *list_cmd = app.add_subcommand("list", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*exact_cmd) {
            return cmd_exact(exact_id, exact_format, exact_out);
        }
        if (*validate_cmd) {
            return cmd_validate(validate_path);
        }
        if (*list_cmd) {
            return cmd_list();
        }
    } catch (const Failure &f) {
        std::cerr << "nulllab: " << f.message << "\n";
        return f.code;
    } catch (const nulllab::Error &e) {
        std::cerr << "nulllab: " << e.what() << "\n";
        return kInvalidScenario;
    }
    return kUsage;
}
