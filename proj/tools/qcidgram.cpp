#include <qcidgram/bundle.hpp>
#include <qcidgram/derivation.hpp>
#include <qcidgram/export.hpp>
#include <qcidgram/qcid.hpp>
#include <qcidgram/service.hpp>

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace qcidgram;

namespace {

enum Exit {
    ok = 0,
    check_failed = 1,
    usage = 2,
    file_error = 3,
    derivation_failed = 4,
    script_exhausted = 5,
    internal = 6,
};

struct FileError : Error {
    using Error::Error;
};

nlohmann::json read_json(const fs::path& path)
{
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& ex) {
        throw FileError(path.string() + ": " + ex.what());
    } catch (const BundleError& ex) {
        throw FileError(ex.what());
    }
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        throw FileError(path.string() + ": cannot write file");
    }
}

std::vector<Symbol> read_terms(const fs::path& path)
{
    std::string text = read_file(path);
    std::vector<Symbol> out;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        auto doc = read_json(path);
        const auto& list = doc.is_object() ? doc.at("terms") : doc;
        for (const auto& t : list) {
            out.emplace_back(t.get<std::string>());
        }
        return out;
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        auto e = line.find_last_not_of(" \t\r");
        if (b != std::string::npos && line[b] != '#') {
            out.emplace_back(line.substr(b, e - b + 1));
        }
    }
    return out;
}

std::string default_bundle()
{
    const char* env = std::getenv("QCIDGRAM_BUNDLE");
    return env ? env : "";
}

Bundle open_bundle(const std::string& path)
{
    if (path.empty()) {
        throw FileError("no bundle given; pass --bundle or set QCIDGRAM_BUNDLE");
    }
    return load_bundle(path);
}

struct Outputs {
    nlohmann::json diagram;
    std::string dot;
    PropertyReport report;
    QcidModel model;
};

Outputs render(const LabeledGraph& g, const Taxonomy& t)
{
    Outputs o;
    o.model = classify_model(g, t);
    auto coords = layout(o.model);
    o.diagram = to_diagram(o.model, coords);
    o.dot = to_dot(o.model, &coords);
    o.report = check_properties(o.model);
    return o;
}

void write_outputs(const fs::path& dir, const Outputs& o, const nlohmann::json& transcript)
{
    fs::create_directories(dir);
    write_file(dir / "diagram.json", o.diagram.dump(2) + "\n");
    write_file(dir / "diagram.dot", o.dot);
    write_file(dir / "transcript.json", transcript.dump(2) + "\n");
    write_file(dir / "report.json", o.report.to_json().dump(2) + "\n");
    write_file(dir / "report.txt", o.report.to_table(o.model));
}

struct DeriveOptions {
    std::string bundle = default_bundle();
    std::vector<std::string> terms;
    std::string terms_file;
    std::string mode = "policy";
    std::string out_dir = ".";
};

int run_derive(const DeriveOptions& opt)
{
    auto bundle = open_bundle(opt.bundle);
    std::vector<Symbol> terms;
    for (const auto& t : opt.terms) {
        if (!t.empty()) {
            terms.emplace_back(t);
        }
    }
    if (!opt.terms_file.empty()) {
        for (auto& t : read_terms(opt.terms_file)) {
            terms.push_back(std::move(t));
        }
    }

    std::unique_ptr<ChoiceProvider> provider;
    if (opt.mode == "policy") {
        provider = std::make_unique<FirstCandidatePolicy>();
    } else if (opt.mode == "interactive") {
        provider = std::make_unique<InteractiveChoices>(std::cin, std::cout);
    } else if (opt.mode.rfind("script=", 0) == 0) {
        provider = std::make_unique<ScriptedChoices>(answers_from_json(read_json(opt.mode.substr(7))));
    } else {
        std::cerr << "error: --mode must be interactive, policy or script=FILE\n";
        return usage;
    }

    auto result = derive(bundle.grammar, bundle.taxonomy, terms, *provider);
    if (!result.success) {
        std::cerr << (result.failure ? result.failure->describe() : std::string("derivation failed\n"));
        return derivation_failed;
    }
    auto out = render(result.graph, result.taxonomy);
    write_outputs(opt.out_dir, out, transcript_to_json(result.transcript, bundle.grammar));
    std::cout << out.report.to_table(out.model);
    return ok;
}

int run_check(const std::string& diagram_path)
{
    QcidModel model;
    try {
        model = model_from_diagram(read_json(diagram_path));
    } catch (const ModelError& ex) {
        throw FileError(diagram_path + ": " + ex.what());
    }
    auto report = check_properties(model);
    std::cout << report.to_table(model);
    return report.all_pass() ? ok : check_failed;
}

int run_replay(const std::string& bundle_path, const std::string& transcript_path, const std::string& out_dir)
{
    auto bundle = open_bundle(bundle_path);
    auto doc = read_json(transcript_path);
    auto transcript = transcript_from_json(doc, bundle.grammar);
    replay(transcript, bundle.grammar, bundle.taxonomy, transcript.terms);

    ScriptedChoices script(transcript.answers());
    auto result = derive(bundle.grammar, bundle.taxonomy, transcript.terms, script);
    auto out = render(result.graph, result.taxonomy);
    write_outputs(out_dir, out, transcript_to_json(result.transcript, bundle.grammar));
    std::cout << out.report.to_table(out.model);
    return ok;
}

HttpService* active_service = nullptr;

int run_serve(const std::string& bundle_path, const std::string& host, int port)
{
    SessionStore store(open_bundle(bundle_path));
    HttpService service(store);
    int bound = service.bind(host, port);
    std::cout << "listening on " << host << ":" << bound << std::endl;
    active_service = &service;
    auto on_signal = [](int) {
        if (active_service) {
            active_service->stop();
        }
    };
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.listen();
    active_service = nullptr;
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Build qualitative influence diagrams by graph-grammar derivation"};
    app.require_subcommand(1);

    DeriveOptions derive_opt;
    auto* derive_cmd = app.add_subcommand("derive", "Derive a diagram from a list of terms");
    derive_cmd->add_option("--bundle", derive_opt.bundle, "Grammar pack directory (default: $QCIDGRAM_BUNDLE)");
    derive_cmd->add_option("--terms", derive_opt.terms, "Input terms")->delimiter(',');
    derive_cmd->add_option("--terms-file", derive_opt.terms_file, "File listing input terms");
    derive_cmd->add_option("--mode", derive_opt.mode, "interactive, policy, or script=FILE");
    derive_cmd->add_option("--out-dir", derive_opt.out_dir, "Directory for diagram, transcript and report");

    std::string diagram_path;
    auto* check_cmd = app.add_subcommand("check", "Check the properties of a structured diagram");
    check_cmd->add_option("diagram", diagram_path, "Diagram JSON file")->required();

    std::string replay_bundle = default_bundle();
    std::string transcript_path;
    std::string replay_out = ".";
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded transcript and re-export");
    replay_cmd->add_option("--bundle", replay_bundle, "Grammar pack directory");
    replay_cmd->add_option("transcript", transcript_path, "Transcript JSON file")->required();
    replay_cmd->add_option("--out-dir", replay_out, "Output directory");

    std::string serve_bundle = default_bundle();
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
    serve_cmd->add_option("--bundle", serve_bundle, "Grammar pack directory");
    serve_cmd->add_option("--host", host, "Address to bind");
    serve_cmd->add_option("--port", port, "Port (0 picks a free port)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        int code = app.exit(ex);
        return code == 0 ? ok : usage;
    }

    try {
        if (*derive_cmd) {
            if (derive_cmd->count("--terms") + derive_cmd->count("--terms-file") == 0) {
                std::cerr << "error: pass --terms or --terms-file\n";
                return usage;
            }
            return run_derive(derive_opt);
        }
        if (*check_cmd) {
            return run_check(diagram_path);
        }
        if (*replay_cmd) {
            return run_replay(replay_bundle, transcript_path, replay_out);
        }
        if (*serve_cmd) {
            return run_serve(serve_bundle, host, port);
        }
    } catch (const ScriptExhaustedError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return script_exhausted;
    } catch (const FileError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return file_error;
    } catch (const BundleError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return file_error;
    } catch (const TranscriptMismatchError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return derivation_failed;
    } catch (const DerivationError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return derivation_failed;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return internal;
    }
    return internal;
}
