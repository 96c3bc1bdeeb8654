// eventsem: batch front end for zero-shot event retrieval.
//
//   eventsem pool       pool detector score tracks into a video x concept CSV
//   eventsem relevance  concepts most relevant to a free-text query
//   eventsem rank       rank a corpus for every event in a query file
//   eventsem eval       AP / AUC / MAP of a ranked TSV against ground truth
//   eventsem bench      timing of ranking on synthetic corpora of several sizes
//   eventsem synth      write a seeded synthetic fixture set
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eventsem/eventsem.hpp"

namespace es = eventsem;

namespace {

struct SpaceOptions {
    std::string embeddings;
    std::string format = "auto";
    std::string stopwords;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--embeddings", embeddings, "Word vector file (word2vec text or binary)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--format", format, "Embedding file format")
            ->check(CLI::IsMember({"auto", "text", "binary"}));
        cmd->add_option("--stopwords", stopwords, "Stop-word file, one token per line (default: built-in English list)")
            ->check(CLI::ExistingFile);
    }

    es::EmbeddingSpace load() const {
        es::EmbeddingFormat fmt = es::EmbeddingFormat::text;
        if (format == "binary" || (format == "auto" && std::filesystem::path(embeddings).extension() == ".bin"))
            fmt = es::EmbeddingFormat::binary;
        auto space = es::load_embeddings(embeddings, fmt);
        if (space.duplicate_count() != 0)
            std::cerr << "warning: " << space.duplicate_count() << " duplicate token(s) in " << embeddings
                      << " (first occurrence kept)\n";
        return space;
    }

    es::StopWordList stops() const {
        return stopwords.empty() ? es::StopWordList::english() : es::StopWordList::from_file(stopwords);
    }
};

void report_repository(const es::ConceptRepository& repo) {
    for (const auto& id : repo.excluded_ids())
        std::cerr << "warning: concept '" << id << "' has no in-vocabulary token and is excluded from scoring\n";
}

void report_corpus(const es::CorpusReport& r) {
    for (const auto& m : r.malformed) std::cerr << "warning: skipped malformed line " << m << '\n';
    std::cerr << "corpus: " << r.videos << " videos, " << r.videos_with_scores << " with concept scores, "
              << r.videos_with_transcripts << " with transcripts\n";
}

// Writes to `path`, or stdout when empty.
template <class F>
void with_output(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw es::InputError("cannot write " + path);
    write(out);
    if (!out) throw es::InputError("write failed: " + path);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void write_synthetic_fixtures(const std::string& dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto sc = es::synthetic::make_scenario(seed);
    es::save_embeddings(sc.space, (fs::path(dir) / "embeddings.txt").string(), es::EmbeddingFormat::text);

    nlohmann::json concepts = nlohmann::json::array();
    for (const auto& c : sc.concepts)
        concepts.push_back({{"id", c.id}, {"name", c.name}, {"keywords", c.keywords}, {"kind", es::to_string(c.kind)}});
    std::ofstream(fs::path(dir) / "concepts.json") << concepts.dump(2) << '\n';

    const es::ConceptRepository ids(sc.concepts);
    std::ofstream csv(fs::path(dir) / "scores.csv");
    es::write_pooled_csv(csv, sc.videos, ids);

    std::ofstream transcripts(fs::path(dir) / "transcripts.jsonl");
    for (const auto& v : sc.videos)
        if (v.has_transcript)
            transcripts << nlohmann::json{{"video", v.id}, {"ocr", v.ocr_text}, {"asr", v.asr_text}}.dump() << '\n';

    nlohmann::json queries = nlohmann::json::array();
    for (const auto& [id, title] : sc.queries) queries.push_back({{"event", id}, {"title", title}});
    std::ofstream(fs::path(dir) / "queries.json") << queries.dump(2) << '\n';

    std::ofstream truth(fs::path(dir) / "truth.csv");
    truth << "event_id,video_id,label\n";
    for (const auto& [id, _] : sc.queries)
        for (const auto& v : sc.videos) truth << id << ',' << v.id << ',' << (*sc.truth.label(id, v.id) ? 1 : 0) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot event retrieval over concept, OCR and ASR evidence"};
    app.require_subcommand(1);

    // pool
    auto* pool = app.add_subcommand("pool", "Pool per-frame concept scores into a video x concept CSV");
    std::string pool_scores, pool_concepts, pool_mode = "max", pool_out;
    pool->add_option("--scores", pool_scores, "Score tracks, JSON Lines")->required()->check(CLI::ExistingFile);
    pool->add_option("--concepts", pool_concepts, "Concept repository JSON")->required()->check(CLI::ExistingFile);
    pool->add_option("--mode", pool_mode, "Pooling over frames/chunks")->check(CLI::IsMember({"max", "avg"}));
    pool->add_option("--out", pool_out, "Output CSV (default: stdout)");

    // relevance
    auto* rel = app.add_subcommand("relevance", "List the concepts most relevant to a query");
    SpaceOptions rel_space;
    rel_space.add_to(rel);
    std::string rel_concepts, rel_query, rel_kernel = "pooled";
    std::size_t rel_top = 20;
    double rel_percentile = 50.0;
    rel->add_option("--concepts", rel_concepts, "Concept repository JSON")->required()->check(CLI::ExistingFile);
    rel->add_option("--query", rel_query, "Free-text event query")->required();
    rel->add_option("--kernel", rel_kernel)->check(CLI::IsMember({"pooled", "hausdorff"}));
    rel->add_option("--top", rel_top, "Number of concepts to list");
    rel->add_option("--percentile", rel_percentile, "Percentile for the Hausdorff kernel")->check(CLI::Range(0.0, 100.0));

    // rank
    auto* rank = app.add_subcommand("rank", "Rank videos for every event in a query file");
    SpaceOptions rank_space;
    rank_space.add_to(rank);
    std::string rank_concepts, rank_scores, rank_transcripts, rank_queries, rank_config, rank_out;
    rank->add_option("--concepts", rank_concepts, "Concept repository JSON")->required()->check(CLI::ExistingFile);
    rank->add_option("--scores", rank_scores, "Score tracks (.jsonl) or pre-pooled matrix (.csv)")
        ->check(CLI::ExistingFile);
    rank->add_option("--transcripts", rank_transcripts, "OCR/ASR transcripts, JSON Lines")->check(CLI::ExistingFile);
    rank->add_option("--queries", rank_queries, "Event queries JSON")->required()->check(CLI::ExistingFile);
    rank->add_option("--config", rank_config, "key = value configuration file")->check(CLI::ExistingFile);
    rank->add_option("--out", rank_out, "Ranked TSV (default: stdout)");
    std::map<std::string, std::string> overrides;
    const std::pair<const char*, const char*> override_keys[] = {
        {"kernel", "pooled | hausdorff (default pooled)"},
        {"mode", "Frame pooling: max | avg (default max)"},
        {"R", "Top concepts kept per event (default 5)"},
        {"w", "Fusion weight of the concept channel (default 6)"},
        {"k", "Nearest words added to text queries (default 5)"},
        {"percentile", "Hausdorff percentile (default 50)"},
        {"text-norm", "mean | raw (default mean)"},
        {"scorer", "fused | concept | ocr | asr | matching-ocr | matching-asr (default fused)"},
        {"threads", "Scoring threads (default 1)"},
    };
    for (const auto& [key, help] : override_keys)
        rank->add_option_function<std::string>(
            std::string("--") + key, [&overrides, key = key](const std::string& v) { overrides[key] = v; }, help);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a ranked TSV against ground truth");
    std::string eval_ranked, eval_truth, eval_out;
    eval->add_option("--ranked", eval_ranked, "Ranked TSV from `rank`")->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", eval_truth, "Ground truth CSV event_id,video_id,label")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--out", eval_out, "Report TSV");

    // bench
    auto* bench = app.add_subcommand("bench", "Time ranking on synthetic corpora");
    es::BenchParams bench_params;
    std::string bench_sizes;
    bench->add_option("--videos", bench_sizes, "Comma-separated corpus sizes, e.g. 1000,2000,4000")->required();
    bench->add_option("--concepts", bench_params.concepts, "Number of concepts N");
    bench->add_option("--dim", bench_params.dim, "Embedding dimension M");
    bench->add_option("--events", bench_params.events, "Events ranked per run");
    bench->add_option("--repeat", bench_params.repeat, "Timed runs per size");
    bench->add_option("--R", bench_params.retrieval.top_r, "Concepts kept per event");
    bench->add_option("--threads", bench_params.retrieval.threads, "Scoring threads");
    bench->add_option("--seed", bench_params.seed, "Seed for synthetic data");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic fixture set");
    std::string synth_dir;
    std::uint64_t synth_seed = 42;
    synth->add_option("--out-dir", synth_dir, "Output directory")->required();
    synth->add_option("--seed", synth_seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*pool) {
            const es::ConceptRepository repo(es::load_concept_definitions(pool_concepts));
            auto corpus = es::load_corpus_jsonl(pool_scores, "", repo, es::parse_pooling_mode(pool_mode));
            report_corpus(corpus.report);
            with_output(pool_out, [&](std::ostream& out) { es::write_pooled_csv(out, corpus.records, repo); });
        } else if (*rel) {
            const auto space = rel_space.load();
            const auto stops = rel_space.stops();
            const auto repo = es::load_concepts(rel_concepts, space, stops);
            report_repository(repo);
            const auto tokens = es::tokenize(rel_query, stops);
            const auto query = es::embed_tokens(space, tokens);
            for (const auto& t : query.oov_tokens) std::cerr << "warning: query token '" << t << "' is OOV\n";
            const auto ranked = es::rank_concepts(repo, query, es::parse_kernel(rel_kernel), rel_percentile);
            std::cout << "rank\tconcept\tname\tweight\n";
            const auto top = es::top_r(ranked, rel_top);
            for (std::size_t i = 0; i < top.size(); ++i)
                std::cout << i + 1 << '\t' << top[i].id << '\t' << repo.at(top[i].index).name << '\t'
                          << es::format_fixed(top[i].weight) << '\n';
        } else if (*rank) {
            es::PipelineConfig cfg;
            if (!rank_config.empty()) es::apply_config_file(cfg, rank_config);
            for (const auto& [key, value] : overrides)
                es::apply_setting(cfg, key == "text-norm" ? "text_norm" : key, value);
            if (rank_scores.empty() && rank_transcripts.empty())
                throw es::InputError("rank needs --scores and/or --transcripts");

            const auto space = rank_space.load();
            const auto stops = rank_space.stops();
            const auto repo = es::load_concepts(rank_concepts, space, stops);
            report_repository(repo);
            const auto corpus = es::load_corpus(rank_scores, rank_transcripts, repo, cfg.pooling);
            report_corpus(corpus.report);
            if (corpus.records.empty()) throw es::InputError("corpus is empty");

            const auto queries = es::load_queries(rank_queries, stops);
            const auto prepared = es::prepare_corpus(corpus.records, space, stops, cfg.retrieval.threads);
            std::vector<es::RankedList> lists;
            for (const auto& q : queries) {
                const auto ev = es::prepare_event(q, repo, space, cfg.retrieval);
                lists.push_back(es::rank_event(ev, prepared, repo, stops, cfg.retrieval));
                for (const auto& d : lists.back().diagnostics) std::cerr << "warning: " << d << '\n';
            }
            with_output(rank_out, [&](std::ostream& out) { es::write_ranked_tsv(out, lists); });
        } else if (*eval) {
            std::ifstream in(eval_ranked);
            const auto lists = es::read_ranked_tsv(in, eval_ranked);
            const auto truth = es::load_truth_csv(eval_truth);
            const auto report = es::evaluate(lists, truth);
            if (!eval_out.empty())
                with_output(eval_out, [&](std::ostream& out) { es::write_report_tsv(out, report); });
            es::print_report_table(std::cout, report);
        } else if (*bench) {
            for (const auto& s : split_list(bench_sizes)) {
                std::size_t n = 0;
                if (!es::detail::parse_number(s, n)) throw es::InputError("bench: invalid corpus size '" + s + "'");
                bench_params.sizes.push_back(n);
            }
            const auto result = es::run_bench(bench_params);
            es::print_bench(std::cout, bench_params, result);
        } else if (*synth) {
            write_synthetic_fixtures(synth_dir, synth_seed);
        }
    } catch (const es::InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const es::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const es::UnscorableError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
