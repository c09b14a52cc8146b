#include "langinc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "langinc/analysis.hpp"
#include "langinc/corpus.hpp"
#include "langinc/embed.hpp"
#include "langinc/error.hpp"
#include "langinc/metrics.hpp"
#include "langinc/report.hpp"
#include "langinc/synth.hpp"
#include "langinc/taxonomy.hpp"

namespace langinc::cli {
namespace {

namespace fs = std::filesystem;
using report::Format;

struct Options {
  std::string corpus;
  std::string gazetteer;
  std::string resources;
  std::string thresholds;
  std::string wals;
  std::string model;
  std::string out;
  std::string format = "csv";
  std::string fields = "title,abstract";
  std::vector<std::string> venues;
  std::uint64_t seed = 42;
  TrainConfig train;
  std::vector<std::size_t> ks = {5, 10, 15, 20};
  std::size_t m = 20;
  double train_fraction = 0.8;
  std::string kinds;
  std::vector<int> classes;
  TsneConfig tsne;
  synth::PlantSpec plant;
};

class Runner {
 public:
  Runner(const Options& options, std::ostream& out, std::ostream& err)
      : o_(options), out_(out), err_(err) {}

  void synth() {
    synth::PlantSpec spec = o_.plant;
    spec.seed = o_.seed;
    const auto planted = synth::generate(spec);
    const fs::path dir = require(o_.out, "--out");
    fs::create_directories(dir);
    save_corpus(planted.corpus, dir / "corpus.jsonl");
    std::ostringstream gazetteer;
    write_gazetteer(planted.gazetteer, gazetteer);
    report::write_file(dir / "gazetteer.tsv", gazetteer.str());
    std::ostringstream resources;
    write_resources_csv(planted.resources, resources);
    report::write_file(dir / "resources.csv", resources.str());
    err_ << "wrote " << planted.corpus.size() << " papers to " << dir.string() << '\n';
  }

  void ingest() {
    require(o_.gazetteer, "--gazetteer");
    const Corpus corpus = read_corpus();
    save_corpus(corpus, require(o_.out, "--out"));
    std::size_t mentions = 0;
    for (const auto& paper : corpus.papers()) mentions += paper.languages.size();
    err_ << "annotated " << corpus.size() << " papers, " << mentions << " language mentions\n";
  }

  void classify() {
    const Taxonomy taxonomy = read_taxonomy();
    emit([&](std::ostream& stream) { report::write_taxonomy(taxonomy, format(), stream); });
  }

  void typology() {
    const Taxonomy taxonomy = read_taxonomy();
    const TypologyTable table = load_typology(require(o_.wals, "--wals"));
    const auto result = typology_exclusions(table, taxonomy.classes());
    if (result.skipped_rows > 0) {
      err_ << "warning: skipped " << result.skipped_rows << " typology rows with unclassified languages\n";
    }
    emit([&](std::ostream& stream) { report::write_typology(result, format(), stream); });
  }

  void entropy() {
    const Corpus corpus = read_corpus();
    const auto rows = entropy_rows(corpus);
    emit([&](std::ostream& stream) { report::write_entropy(rows, format(), stream); });
  }

  void mrr() {
    const Corpus corpus = read_corpus();
    const auto tables = mrr_tables(corpus);
    emit([&](std::ostream& stream) { report::write_mrr(tables, format(), stream); });
  }

  void train() {
    const Corpus corpus = read_corpus();
    TrainConfig cfg = o_.train;
    cfg.seed = o_.seed;
    TrainStats stats;
    const EmbeddingModel model = langinc::train(corpus, cfg, &stats);
    save_model(model, require(o_.out, "--out"));
    if (stats.skipped_papers > 0) {
      err_ << "warning: skipped " << stats.skipped_papers << " papers without in-vocabulary tokens\n";
    }
    for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e) {
      err_ << "epoch " << e + 1 << " mean loss " << stats.epoch_mean_loss[e] << '\n';
    }
    if (cfg.threads > 1) err_ << "note: multi-threaded training is not bit-reproducible\n";
    err_ << "model: " << model.entity_count() << " entities, " << model.vocab.size()
         << " words, dim " << model.dim << '\n';
  }

  void distances() {
    const EmbeddingModel model = read_model();
    const ClassMap classes = model_classes(model);
    const auto table = class_distance_table(model, classes);
    emit([&](std::ostream& stream) { report::write_distances(table, format(), stream); });
  }

  void lalmrr() {
    const EmbeddingModel model = read_model();
    const auto table = lal_mrr(model, model_classes(model), o_.ks, o_.m);
    emit([&](std::ostream& stream) { report::write_lal_mrr(table, format(), stream); });
  }

  void yearreg() {
    const EmbeddingModel model = read_model();
    const Corpus corpus = read_corpus();
    const auto eval = year_regression_eval(model, corpus, o_.seed, o_.train_fraction);
    note_regression(eval);
    emit([&](std::ostream& stream) { report::write_regression(eval, format(), stream); });
  }

  void project() {
    const EmbeddingModel model = read_model();
    const ClassMap classes = model_classes(model);
    const auto projection = run_projection(model, classes);
    const Format fmt = format();
    if (fmt == Format::Svg) {
      const std::string svg = report::svg_scatter(projection, &classes);
      emit([&](std::ostream& stream) { stream << svg; });
    } else if (fmt == Format::Json) {
      throw UsageError("project supports --format csv or svg");
    } else {
      emit([&](std::ostream& stream) { report::write_projection_csv(projection, stream); });
    }
  }

  void full_report() {
    const Corpus corpus = read_corpus();
    const EmbeddingModel model = read_model();
    const fs::path dir = require(o_.out, "--out");
    fs::create_directories(dir);

    const auto entropy = entropy_rows(corpus);
    const auto mrr = mrr_tables(corpus);
    const ClassMap classes = model_classes(model);
    const auto distances = class_distance_table(model, classes);
    const auto lal = lal_mrr(model, classes, o_.ks, o_.m);
    const auto regression = year_regression_eval(model, corpus, o_.seed, o_.train_fraction);
    note_regression(regression);
    const auto projection = run_projection(model, classes);

    write_to(dir / "entropy.csv", [&](std::ostream& s) { report::write_entropy(entropy, Format::Csv, s); });
    write_to(dir / "mrr.csv", [&](std::ostream& s) { report::write_mrr(mrr, Format::Csv, s); });
    write_to(dir / "distances.csv",
             [&](std::ostream& s) { report::write_distances(distances, Format::Csv, s); });
    write_to(dir / "lalmrr.csv", [&](std::ostream& s) { report::write_lal_mrr(lal, Format::Csv, s); });
    write_to(dir / "yearreg.csv",
             [&](std::ostream& s) { report::write_regression(regression, Format::Csv, s); });
    write_to(dir / "projection.csv", [&](std::ostream& s) { report::write_projection_csv(projection, s); });
    report::emit_svg_scatter(projection, dir / "projection.svg", &classes);

    const nlohmann::json combined = {
        {"papers", corpus.size()},
        {"entropy", report::to_json(entropy)},
        {"mrr", report::to_json(mrr)},
        {"distances", report::to_json(distances)},
        {"lal_mrr", report::to_json(lal)},
        {"year_regression", report::to_json(regression)},
        {"projection", {{"points", projection.size()},
                        {"initial_kl", projection.initial_kl},
                        {"final_kl", projection.final_kl}}}};
    report::write_file(dir / "report.json", combined.dump(2) + "\n");
    err_ << "report written to " << dir.string() << '\n';
  }

 private:
  static std::string require(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string(flag) + " is required");
    return value;
  }

  Format format() const { return report::parse_format(o_.format); }

  void write_to(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buffer;
    body(buffer);
    report::write_file(path, buffer.str());
  }

  void emit(const std::function<void(std::ostream&)>& body) {
    if (o_.out.empty() || o_.out == "-") {
      body(out_);
    } else {
      write_to(o_.out, body);
    }
  }

  Corpus read_corpus() {
    Corpus corpus = load_corpus(require(o_.corpus, "--corpus"));
    if (!o_.gazetteer.empty()) {
      corpus = annotate(corpus, load_gazetteer(o_.gazetteer), FieldSelector::parse(o_.fields));
    }
    return corpus;
  }

  Taxonomy read_taxonomy() {
    TaxonomyThresholds thresholds;
    if (!o_.thresholds.empty()) thresholds = TaxonomyThresholds::load(o_.thresholds);
    return build_taxonomy(fs::path(require(o_.resources, "--resources")), thresholds);
  }

  EmbeddingModel read_model() { return load_model(require(o_.model, "--model")); }

  // Resource classes extended by `extra` ids; ids missing from the resource
  // file become class 0 with a warning.
  ClassMap classes_with(const std::set<std::string>& extra) {
    ClassMap classes = read_taxonomy().classes();
    std::vector<std::string> missing;
    for (const auto& id : extra) {
      if (!classes.contains(id)) {
        missing.push_back(id);
        classes.emplace(id, 0);
      }
    }
    if (!missing.empty()) {
      err_ << "warning: " << missing.size()
           << " languages missing from the resource file were put in class 0:";
      for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 10); ++i) {
        err_ << ' ' << missing[i];
      }
      err_ << (missing.size() > 10 ? " ...\n" : "\n");
    }
    return classes;
  }

  ClassMap model_classes(const EmbeddingModel& model) {
    std::set<std::string> languages;
    for (const auto row : model.entities_of_kind(EntityKind::Language)) {
      languages.insert(model.entities[row].key);
    }
    return classes_with(languages);
  }

  std::vector<std::string> selected_venues(const Corpus& corpus) const {
    if (!o_.venues.empty()) return o_.venues;
    return {corpus.venues().begin(), corpus.venues().end()};
  }

  std::vector<EntropyResult> entropy_rows(const Corpus& corpus) {
    std::vector<EntropyResult> rows;
    for (const auto& venue : selected_venues(corpus)) {
      auto series = entropy_series(corpus, venue);
      if (series.empty()) err_ << "warning: no papers for venue " << venue << '\n';
      rows.insert(rows.end(), series.begin(), series.end());
    }
    return rows;
  }

  std::vector<MrrTable> mrr_tables(const Corpus& corpus) {
    std::set<std::string> ids;
    if (!o_.gazetteer.empty()) {
      const auto gazetteer_ids = load_gazetteer(o_.gazetteer).ids();
      ids.insert(gazetteer_ids.begin(), gazetteer_ids.end());
    }
    for (const auto& paper : corpus.papers()) ids.insert(paper.languages.begin(), paper.languages.end());
    const ClassMap classes = classes_with(ids);
    std::set<std::string> universe;
    for (const auto& [id, cls] : classes) universe.insert(id);
    std::vector<MrrTable> tables;
    for (const auto& venue : selected_venues(corpus)) {
      tables.push_back(classwise_mrr(corpus, venue, classes, universe));
    }
    return tables;
  }

  Projection2D run_projection(const EmbeddingModel& model, const ClassMap& classes) {
    EntitySelection selection;
    if (!o_.kinds.empty()) {
      std::stringstream list(o_.kinds);
      std::string name;
      while (std::getline(list, name, ',')) {
        const auto kind = parse_entity_kind(name);
        if (!kind) throw UsageError("unknown entity kind '" + name + "'");
        selection.kinds.insert(*kind);
      }
    }
    selection.venues.insert(o_.venues.begin(), o_.venues.end());
    selection.language_classes = classes;
    selection.classes.insert(o_.classes.begin(), o_.classes.end());
    TsneConfig config = o_.tsne;
    config.seed = o_.seed;
    const auto projection = tsne_project(model, selection, config);
    err_ << "t-SNE: " << projection.size() << " points, KL " << projection.initial_kl << " -> "
         << projection.final_kl << '\n';
    return projection;
  }

  void note_regression(const RegressionEval& eval) {
    if (eval.oov_excluded > 0) {
      err_ << "warning: excluded " << eval.oov_excluded << " papers without in-vocabulary tokens\n";
    }
    if (!eval.r2) err_ << "warning: test split has a single year; R^2 is undefined\n";
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

void add_output(CLI::App* sub, Options& o, bool with_format = true) {
  sub->add_option("--out", o.out, "Output path ('-' or omitted: standard output)");
  if (with_format) {
    sub->add_option("--format", o.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  }
}

void add_corpus(CLI::App* sub, Options& o) {
  sub->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  sub->add_option("--gazetteer", o.gazetteer, "Gazetteer TSV; detects languages for unannotated papers");
  sub->add_option("--fields", o.fields, "Fields scanned for language mentions")
      ->capture_default_str();
}

void add_taxonomy(CLI::App* sub, Options& o, bool required = true) {
  auto* resources = sub->add_option("--resources", o.resources, "Resource-count CSV");
  if (required) resources->required();
  sub->add_option("--thresholds", o.thresholds, "Threshold JSON");
}

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

void add_lal(CLI::App* sub, Options& o) {
  sub->add_option("--k", o.ks, "Nearest-author counts K")->capture_default_str()->delimiter(',');
  sub->add_option("--m", o.m, "Languages per author M")->capture_default_str();
}

void add_tsne(CLI::App* sub, Options& o) {
  sub->add_option("--kinds", o.kinds, "Comma-separated entity kinds to project");
  sub->add_option("--venue", o.venues, "Restrict venues (repeatable)");
  sub->add_option("--classes", o.classes, "Restrict language classes")->delimiter(',');
  sub->add_option("--perplexity", o.tsne.perplexity)->capture_default_str();
  sub->add_option("--iters", o.tsne.iterations)->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Language-inclusion analytics over publication corpora", "langinc"};
  app.require_subcommand(1);
  std::function<void(Runner&)> action;
  auto on = [&](CLI::App* sub, void (Runner::*method)()) {
    sub->callback([&action, method] { action = [method](Runner& r) { (r.*method)(); }; });
  };

  auto* synth_cmd = app.add_subcommand("synth", "Write a planted synthetic corpus to a directory");
  synth_cmd->add_option("--out", o.out, "Output directory")->required();
  synth_cmd->add_option("--communities", o.plant.communities)->capture_default_str();
  synth_cmd->add_option("--authors", o.plant.authors_per_community)->capture_default_str();
  synth_cmd->add_option("--papers-per-author", o.plant.papers_per_author)->capture_default_str();
  synth_cmd->add_option("--first-year", o.plant.first_year)->capture_default_str();
  synth_cmd->add_option("--last-year", o.plant.last_year)->capture_default_str();
  synth_cmd->add_option("--drift-words", o.plant.drift_words_per_year)->capture_default_str();
  add_seed(synth_cmd, o);
  on(synth_cmd, &Runner::synth);

  auto* ingest = app.add_subcommand("ingest", "Detect language mentions and write an annotated corpus");
  ingest->add_option("--corpus", o.corpus)->required();
  ingest->add_option("--gazetteer", o.gazetteer)->required();
  ingest->add_option("--fields", o.fields)->capture_default_str();
  ingest->add_option("--out", o.out, "Annotated corpus JSONL")->required();
  on(ingest, &Runner::ingest);

  auto* classify = app.add_subcommand("classify", "Assign resource classes 0-5");
  add_taxonomy(classify, o);
  add_output(classify, o);
  on(classify, &Runner::classify);

  auto* typology = app.add_subcommand("typology", "Count typological categories missing from classes 3-5");
  add_taxonomy(typology, o);
  typology->add_option("--wals", o.wals, "Typology CSV")->required();
  add_output(typology, o);
  on(typology, &Runner::typology);

  auto* entropy = app.add_subcommand("entropy", "Language occurrence entropy per venue-year");
  add_corpus(entropy, o);
  entropy->add_option("--venue", o.venues, "Venue (repeatable; default all)");
  add_output(entropy, o);
  on(entropy, &Runner::entropy);

  auto* mrr = app.add_subcommand("mrr", "Class-wise mean reciprocal rank per venue");
  add_corpus(mrr, o);
  add_taxonomy(mrr, o);
  mrr->add_option("--venue", o.venues, "Venue (repeatable; default all)");
  add_output(mrr, o);
  on(mrr, &Runner::mrr);

  auto* train = app.add_subcommand("train", "Train entity and word embeddings");
  add_corpus(train, o);
  train->add_option("--dim", o.train.dim)->capture_default_str();
  train->add_option("--epochs", o.train.epochs)->capture_default_str();
  train->add_option("--k-words", o.train.k_words)->capture_default_str();
  train->add_option("--negatives", o.train.negatives)->capture_default_str();
  train->add_option("--min-count", o.train.min_count)->capture_default_str();
  train->add_option("--lr", o.train.initial_lr, "Initial learning rate")->capture_default_str();
  train->add_option("--subsample", o.train.subsample, "Frequent-word subsampling (0 = off)")
      ->capture_default_str();
  train->add_option("--threads", o.train.threads)->capture_default_str();
  add_seed(train, o);
  train->add_option("--out", o.out, "Model file")->required();
  on(train, &Runner::train);

  auto* distances = app.add_subcommand("distances", "Cosine distance of venues to class mean vectors");
  distances->add_option("--model", o.model)->required();
  add_taxonomy(distances, o);
  add_output(distances, o);
  on(distances, &Runner::distances);

  auto* lalmrr = app.add_subcommand("lalmrr", "Language-author-language MRR per class");
  lalmrr->add_option("--model", o.model)->required();
  add_taxonomy(lalmrr, o);
  add_lal(lalmrr, o);
  add_output(lalmrr, o);
  on(lalmrr, &Runner::lalmrr);

  auto* yearreg = app.add_subcommand("yearreg", "Predict publication year from paper vectors");
  yearreg->add_option("--model", o.model)->required();
  add_corpus(yearreg, o);
  yearreg->add_option("--train-fraction", o.train_fraction)->capture_default_str();
  add_seed(yearreg, o);
  add_output(yearreg, o);
  on(yearreg, &Runner::yearreg);

  auto* project = app.add_subcommand("project", "2-D t-SNE projection of entity vectors");
  project->add_option("--model", o.model)->required();
  add_taxonomy(project, o, false);
  add_tsne(project, o);
  add_seed(project, o);
  add_output(project, o);
  on(project, &Runner::project);

  auto* full = app.add_subcommand("report", "Run every metric and analysis into a directory");
  add_corpus(full, o);
  add_taxonomy(full, o);
  full->add_option("--model", o.model)->required();
  full->add_option("--out", o.out, "Output directory")->required();
  add_lal(full, o);
  add_tsne(full, o);
  full->add_option("--train-fraction", o.train_fraction)->capture_default_str();
  add_seed(full, o);
  on(full, &Runner::full_report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    Runner runner(o, out, err);
    action(runner);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace langinc::cli
