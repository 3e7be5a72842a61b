#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "widgetfuzz/campaign.hpp"
#include "widgetfuzz/hierarchy_io.hpp"
#include "widgetfuzz/mutation_dsl.hpp"

namespace fs = std::filesystem;
using namespace widgetfuzz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitProvider = 3;
constexpr int kExitDsl = 4;

std::shared_ptr<Provider> make_provider(const std::string& spec) {
    if (spec.rfind("mock:", 0) == 0) {
        return MockProvider::from_script_file(spec.substr(5));
    }
    if (spec == "live") {
        return LiveProvider::from_env();
    }
    throw ProviderUnavailable("provider must be 'mock:<script>' or 'live'");
}

// Deterministic Fisher-Yates so --seed-order is stable across platforms.
void permute_specs(std::vector<AppSpec>& specs, unsigned seed) {
    if (seed == 0) return;
    std::mt19937 rng(seed);
    for (size_t i = specs.size(); i > 1; --i) {
        size_t j = rng() % i;
        std::swap(specs[i - 1], specs[j]);
    }
}

int cmd_run(const std::string& specs_dir, const std::string& config_path,
            const std::string& provider_spec, const std::string& store_path,
            const std::string& report_path, unsigned seed_order, const std::string& clock_override,
            const std::string& template_path) {
    CampaignConfig config;
    try {
        if (!config_path.empty()) config = CampaignConfig::from_file(config_path);
        if (clock_override == "simulated") config.clock = ClockMode::simulated;
        if (clock_override == "wall") config.clock = ClockMode::wall;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::vector<AppSpec> specs;
    try {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(specs_dir)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) specs.push_back(AppSpec::from_file(file.string()));
        if (specs.empty()) throw std::runtime_error("no .json app specs in " + specs_dir);
    } catch (const std::exception& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitConfig;
    }
    permute_specs(specs, seed_order);

    std::shared_ptr<Provider> provider;
    try {
        provider = make_provider(provider_spec);
    } catch (const ProviderUnavailable& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }

    try {
        ExampleStore store = store_path.empty() ? ExampleStore() : ExampleStore::open(store_path);
        const PromptTemplates templates =
            template_path.empty() ? PromptTemplates::defaults() : PromptTemplates::load(template_path);
        CampaignRunner runner(config, provider, store, templates);
        CampaignReport report = runner.run_suite(specs);

        if (!report_path.empty()) {
            std::ofstream out(report_path);
            if (!out) throw std::runtime_error("cannot write report: " + report_path);
            out << report.to_json() << "\n";
        }
        std::cout << report.to_table();
        return kExitOk;
    } catch (const ProviderUnavailable& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_dsl(const std::string& program_path) {
    std::ifstream in(program_path);
    if (!in) {
        std::cerr << "cannot open program file: " << program_path << "\n";
        return kExitConfig;
    }
    std::ostringstream text;
    text << in.rdbuf();

    try {
        dsl::GeneratorProgram program = dsl::parse_program(text.str());
        for (const auto& input : dsl::execute_program(program)) {
            std::string line;
            for (const auto& [id, value] : input.assignment) {
                if (!line.empty()) line += "\t";
                line += id + "=" + value;
            }
            std::cout << line << "\n";
        }
        return kExitOk;
    } catch (const dsl::DslError& e) {
        std::cerr << "DSL error: " << e.what() << "\n";
        return kExitDsl;
    }
}

int cmd_store_list(const std::string& store_path) {
    try {
        ExampleStore store = ExampleStore::load_seed_dataset(store_path);
        for (const auto& record : store.records()) {
            std::cout << record_to_json_line(record) << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "store error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_store_query(const std::string& store_path, const std::string& context_text, int k) {
    try {
        ExampleStore store = ExampleStore::load_seed_dataset(store_path);
        WidgetContext query;
        query.input_widget = context_text;
        for (const auto& [score, record] : store.retrieve_top_k_scored(query, k)) {
            std::cout << std::fixed << std::setprecision(4) << score << "\t"
                      << record.record_id << "\t" << record.buggy_input << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "store error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"widgetfuzz: LLM-driven unusual text input fuzzing for GUI input widgets"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 2 configuration error, 3 provider failure, 4 DSL error.");

    // run
    auto* run = app.add_subcommand("run", "Run a fuzzing campaign over a directory of app specs");
    std::string specs_dir, config_path, provider_spec = "live", store_path, report_path;
    std::string clock_override, template_path;
    unsigned seed_order = 0;
    run->add_option("--specs", specs_dir, "Directory of app-spec JSON files")->required();
    run->add_option("--config", config_path, "Campaign config JSON file");
    run->add_option("--provider", provider_spec, "Provider: mock:<script> or live");
    run->add_option("--store", store_path, "Example store file (JSON lines)");
    run->add_option("--report", report_path, "Write the JSON report here");
    run->add_option("--seed-order", seed_order, "Permute target order with this seed (0 = as listed)");
    run->add_option("--clock", clock_override, "Override clock mode: wall or simulated");
    run->add_option("--templates", template_path, "Prompt template file");

    // dsl
    auto* dsl_cmd = app.add_subcommand("dsl", "Parse and execute a mutation-DSL program");
    std::string program_path;
    dsl_cmd->add_option("--program", program_path, "Program file")->required();

    // store
    auto* store_cmd = app.add_subcommand("store", "Inspect an example store");
    std::string inspect_store_path, query_context;
    int query_k = 5;
    store_cmd->add_option("--store", inspect_store_path, "Store file")->required();
    auto* list_cmd = store_cmd->add_subcommand("list", "Print all records");
    auto* query_cmd = store_cmd->add_subcommand("query", "Top-k retrieval for a context text");
    query_cmd->add_option("--context", query_context, "Query context text")->required();
    query_cmd->add_option("--k", query_k, "Number of results");
    store_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) {
        return cmd_run(specs_dir, config_path, provider_spec, store_path, report_path, seed_order,
                       clock_override, template_path);
    }
    if (dsl_cmd->parsed()) {
        return cmd_dsl(program_path);
    }
    if (store_cmd->parsed()) {
        if (list_cmd->parsed()) return cmd_store_list(inspect_store_path);
        if (query_cmd->parsed()) return cmd_store_query(inspect_store_path, query_context, query_k);
    }
    return kExitConfig;
}
