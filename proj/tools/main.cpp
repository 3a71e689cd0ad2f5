#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "finn/checkpoint.hpp"
#include "finn/data.hpp"
#include "finn/errors.hpp"
#include "finn/text.hpp"
#include "finn/train.hpp"

using namespace finn;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config '" + path + "': expected key = value, got '" +
                                     line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("config '" + path + "': empty key or value in '" +
                                     line + "'");
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

/// Replaces `--config FILE` with the file's entries as `--key=value` tokens,
/// inserted right after the verb so explicit flags win on conflicts.
void splice_config(std::vector<std::string>& args) {
    std::size_t verb = 0;
    while (verb < args.size() && !args[verb].empty() && args[verb][0] == '-') ++verb;
    if (verb >= args.size()) return;

    std::string path;
    for (std::size_t i = verb + 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::runtime_error("--config needs a file argument");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return;
    for (std::size_t i = verb + 1; i < args.size(); ++i)
        if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0)
            throw std::runtime_error("--config may be given at most once");

    const std::vector<std::string> tokens = config_tokens(path);
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(verb) + 1,
                tokens.begin(), tokens.end());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------
// Shared knobs

struct Settings {
    std::string data;
    std::string vocab_path;
    std::string eval_path;  // empty: reuse the training data
    std::string checkpoint;
    std::string out;
    std::string report;

    std::string model = "finn";
    std::size_t embed_dim = 10;
    std::size_t interaction_dim = 10;
    std::size_t layers = 5;
    std::size_t neurons = 64;
    std::string activation = "relu";
    double dropout_keep = 1.0;
    bool use_bn = false;
    double embed_low = -0.01;
    double embed_high = 0.01;

    std::size_t epochs = 1;
    std::size_t batch_size = 256;
    double alpha = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    std::size_t patience = 0;
    std::size_t eval_every = 0;
};

void add_model_flags(CLI::App* cmd, Settings& s) {
    cmd->add_option("--model", s.model,
                    "Variant: lr, fm, fnn, pnn, widedeep, deepfm, finn");
    cmd->add_option("--embed-dim", s.embed_dim, "Embedding dimension k");
    cmd->add_option("--interaction-dim", s.interaction_dim,
                    "Relation tensor slices l (finn)");
    cmd->add_option("--layers", s.layers, "Hidden layer count");
    cmd->add_option("--neurons", s.neurons, "Neurons per hidden layer");
    cmd->add_option("--activation", s.activation, "relu, tanh, sigmoid, identity");
    cmd->add_option("--dropout-keep", s.dropout_keep,
                    "Keep probability; 1 disables dropout");
    cmd->add_flag("--use-bn", s.use_bn, "Batch-normalize the deep input");
    cmd->add_option("--embed-low", s.embed_low, "Embedding init lower bound");
    cmd->add_option("--embed-high", s.embed_high, "Embedding init upper bound");
    cmd->add_option("--seed", s.seed, "Seed for init, shuffling, and dropout");
}

void add_train_flags(CLI::App* cmd, Settings& s) {
    cmd->add_option("--epochs", s.epochs, "Training epochs");
    cmd->add_option("--batch-size", s.batch_size, "Mini-batch size");
    cmd->add_option("--alpha", s.alpha, "Adam learning rate");
    cmd->add_option("--beta1", s.beta1, "Adam first-moment decay");
    cmd->add_option("--beta2", s.beta2, "Adam second-moment decay");
    cmd->add_option("--epsilon", s.epsilon, "Adam denominator offset");
    cmd->add_option("--patience", s.patience,
                    "Stop after this many epochs without eval improvement; 0 off");
    cmd->add_option("--eval-every", s.eval_every,
                    "Extra eval rows every N batches; 0 off");
}

ModelConfig model_config(const Settings& s, const Vocabulary& vocab) {
    ModelConfig cfg;
    cfg.variant = parse_variant(s.model);
    cfg.n = vocab.feature_count();
    cfg.m = vocab.field_count();
    cfg.k = s.embed_dim;
    cfg.l = s.interaction_dim;
    cfg.hidden.assign(s.layers, s.neurons);
    cfg.activation = parse_activation(s.activation);
    cfg.dropout_keep = s.dropout_keep;
    cfg.use_bn = s.use_bn;
    cfg.embed_low = s.embed_low;
    cfg.embed_high = s.embed_high;
    cfg.seed = s.seed;
    return cfg;
}

TrainConfig train_config(const Settings& s) {
    TrainConfig cfg;
    cfg.epochs = s.epochs;
    cfg.batch_size = s.batch_size;
    cfg.alpha = s.alpha;
    cfg.beta1 = s.beta1;
    cfg.beta2 = s.beta2;
    cfg.epsilon = s.epsilon;
    cfg.seed = s.seed;
    cfg.patience = s.patience;
    cfg.eval_every = s.eval_every;
    return cfg;
}

void check_fingerprint(const LoadedCheckpoint& ckpt, const Vocabulary& vocab) {
    if (ckpt.vocab_fingerprint != vocab.fingerprint())
        throw VerificationError(
            "checkpoint was trained against a different vocabulary "
            "(fingerprint mismatch)");
}

// ---------------------------------------------------------------------------
// Commands

struct PreprocessArgs {
    std::string input;
    std::string schema_path;
    std::string out_dir;
    std::string delimiter = ",";
    std::size_t min_count = 1;
    std::size_t n_buckets = 10;
    double pos_ratio = 0.0;  // 0 disables downsampling
    std::uint64_t seed = 1;
};

char delimiter_char(const std::string& text) {
    if (text == "tab" || text == "\\t" || text == "\t") return '\t';
    if (text.size() != 1)
        throw std::invalid_argument("delimiter must be one character or 'tab'");
    return text[0];
}

int cmd_preprocess(const PreprocessArgs& a) {
    const FeatureSchema schema = FeatureSchema::load(a.schema_path);
    const RawTable table =
        read_raw_file(a.input, schema, delimiter_char(a.delimiter));
    const Vocabulary vocab =
        build_vocabulary(table.records, schema, a.min_count, a.n_buckets);
    for (std::size_t f = 0; f < schema.field_count(); ++f)
        if (schema.field(f).kind == FieldKind::categorical &&
            vocab.retained_category_count(f) == 0)
            std::cerr << "warning: field '" << schema.field(f).name
                      << "' retains no categories; every value maps to OOV\n";

    Dataset data;
    data.reserve(table.records.size());
    for (std::size_t i = 0; i < table.records.size(); ++i)
        data.push_back(encode(table.records[i], table.labels[i], vocab));
    if (a.pos_ratio != 0.0) {
        Rng rng(a.seed);
        data = downsample_negatives(data, a.pos_ratio, rng);
    }

    std::filesystem::create_directories(a.out_dir);
    const auto vocab_file = (std::filesystem::path(a.out_dir) / "vocab.tsv").string();
    const auto data_file = (std::filesystem::path(a.out_dir) / "data.tsv").string();
    vocab.save(vocab_file);
    save_dataset(data_file, data);
    std::printf("features=%zu fields=%zu samples=%zu\n", vocab.feature_count(),
                vocab.field_count(), data.size());
    std::printf("wrote %s\nwrote %s\n", vocab_file.c_str(), data_file.c_str());
    return 0;
}

int cmd_train(const Settings& s) {
    const Vocabulary vocab = Vocabulary::load(s.vocab_path);
    const Dataset train_data = load_dataset(s.data);
    const Dataset eval_data =
        s.eval_path.empty() ? train_data : load_dataset(s.eval_path);
    Model g(model_config(s, vocab));
    const TrainReport report = train(g, train_data, eval_data, train_config(s));
    save_checkpoint(s.out, g, vocab.fingerprint());
    const std::string text = report.serialize();
    std::fputs(text.c_str(), stdout);
    if (!s.report.empty()) write_text(s.report, text);
    return 0;
}

int cmd_evaluate(const Settings& s) {
    const LoadedCheckpoint ckpt = load_checkpoint(s.checkpoint);
    const Vocabulary vocab = Vocabulary::load(s.vocab_path);
    check_fingerprint(ckpt, vocab);
    const EvalResult r = evaluate(ckpt.model, load_dataset(s.data));
    std::printf("auc=%.6f logloss=%.6f\n", r.auc, r.logloss);
    return 0;
}

int cmd_predict(const Settings& s) {
    const LoadedCheckpoint ckpt = load_checkpoint(s.checkpoint);
    const Vocabulary vocab = Vocabulary::load(s.vocab_path);
    check_fingerprint(ckpt, vocab);
    const Dataset data = load_dataset(s.data);
    std::string lines;
    char buf[32];
    for (const EncodedSample& sample : data) {
        std::snprintf(buf, sizeof buf, "%.6f\n",
                      ckpt.model.predict(sample).probability);
        lines += buf;
    }
    if (s.out.empty())
        std::fputs(lines.c_str(), stdout);
    else
        write_text(s.out, lines);
    return 0;
}

int cmd_gradcheck(const Settings& s, double tolerance) {
    ModelConfig cfg;
    cfg.variant = parse_variant(s.model);
    cfg.n = 24;
    cfg.m = 4;
    cfg.k = 3;
    cfg.l = 2;
    cfg.hidden = {8, 4};
    cfg.activation = parse_activation(s.activation);
    cfg.use_bn = s.use_bn;
    cfg.embed_low = -0.5;
    cfg.embed_high = 0.5;
    cfg.seed = s.seed;
    Model g(cfg);

    Rng rng(s.seed ^ 0x9e3779b97f4a7c15ull);
    for (Param* p : g.params()) {
        if (p->name == "w0") p->value[0] = rng.uniform(-0.5, 0.5);
        if (p->name == "linear.w")
            for (std::size_t i = 0; i < p->value.size(); ++i)
                p->value[i] = rng.uniform(-0.2, 0.2);
    }
    EncodedSample sample;
    const std::size_t per_field = cfg.n / cfg.m;
    for (std::size_t f = 0; f < cfg.m; ++f)
        sample.indices.push_back(
            static_cast<std::uint32_t>(f * per_field + rng.next_index(per_field)));
    sample.label = rng.next_index(2) ? 1 : 0;

    const GradcheckReport rep = gradcheck(g, sample);
    const bool pass = rep.max_rel_error < tolerance;
    std::printf("model=%s checked=%zu max_rel_error=%.3e worst=%s -> %s\n",
                s.model.c_str(), rep.checked, rep.max_rel_error,
                rep.worst_param.c_str(), pass ? "pass" : "fail");
    return pass ? 0 : 1;
}

void apply_sweep_value(Settings& s, const std::string& key,
                       const std::string& value) {
    if (key == "embed-dim") s.embed_dim = parse_size(value, "embed-dim");
    else if (key == "interaction-dim")
        s.interaction_dim = parse_size(value, "interaction-dim");
    else if (key == "layers") s.layers = parse_size(value, "layers");
    else if (key == "neurons") s.neurons = parse_size(value, "neurons");
    else if (key == "alpha") s.alpha = parse_double(value, "alpha");
    else if (key == "batch-size") s.batch_size = parse_size(value, "batch-size");
    else if (key == "dropout-keep")
        s.dropout_keep = parse_double(value, "dropout-keep");
    else if (key == "use-bn") {
        if (value != "0" && value != "1")
            throw std::invalid_argument("sweep: use-bn takes 0 or 1");
        s.use_bn = value == "1";
    } else
        throw std::invalid_argument("sweep: unknown key '" + key + "'");
}

int cmd_sweep(const Settings& s, const std::string& key,
              const std::string& values_csv) {
    const std::vector<std::string> values = split_line(values_csv, ',');
    if (values_csv.empty() || values.empty())
        throw std::invalid_argument("sweep: --values needs a comma-separated list");

    // Every trial config is materialized up front so a bad key or value
    // fails before any training starts.
    std::vector<Settings> trials;
    for (const std::string& value : values) {
        Settings trial = s;
        apply_sweep_value(trial, key, value);
        trials.push_back(trial);
    }

    const Vocabulary vocab = Vocabulary::load(s.vocab_path);
    const Dataset train_data = load_dataset(s.data);
    const Dataset eval_data =
        s.eval_path.empty() ? train_data : load_dataset(s.eval_path);

    std::string table = "value\tauc\tlogloss\n";
    char buf[64];
    for (std::size_t i = 0; i < trials.size(); ++i) {
        Model g(model_config(trials[i], vocab));
        train(g, train_data, eval_data, train_config(trials[i]));
        const EvalResult r = evaluate(g, eval_data);
        std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\n", r.auc, r.logloss);
        table += values[i] + buf;
    }
    std::fputs(table.c_str(), stdout);
    if (!s.out.empty()) write_text(s.out, table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Click-through-rate prediction: factorization machines, deep "
        "embedding stacks, and a bilinear field-interaction network."};
    app.require_subcommand(1);
    app.footer(
        "Every subcommand also accepts --config FILE: flat `key = value` lines\n"
        "(# comments) merged ahead of the explicit flags, so flags win.");

    Settings s;
    PreprocessArgs pa;
    double tolerance = 1e-5;
    std::string sweep_key;
    std::string sweep_values;

    CLI::App* pre = app.add_subcommand(
        "preprocess", "Fit encoder artifacts and encode a raw delimited file");
    pre->add_option("--input", pa.input, "Raw delimited file with header")->required();
    pre->add_option("--schema", pa.schema_path, "Field schema file")->required();
    pre->add_option("--out", pa.out_dir, "Artifact directory")->required();
    pre->add_option("--delimiter", pa.delimiter, "Column delimiter (or 'tab')");
    pre->add_option("--min-count", pa.min_count,
                    "Categories seen fewer times map to OOV");
    pre->add_option("--buckets", pa.n_buckets,
                    "Quantile buckets per numerical field");
    pre->add_option("--pos-ratio", pa.pos_ratio,
                    "Downsample negatives to this positive ratio; 0 off");
    pre->add_option("--seed", pa.seed, "Downsampling seed");

    CLI::App* tr = app.add_subcommand(
        "train", "Train a model variant on an encoded dataset");
    tr->add_option("--data", s.data, "Encoded training data")->required();
    tr->add_option("--vocab", s.vocab_path, "Vocabulary artifact")->required();
    tr->add_option("--out", s.out, "Checkpoint path")->required();
    tr->add_option("--eval", s.eval_path,
                   "Encoded eval data (default: training data)");
    tr->add_option("--report", s.report, "Also write the epoch report here");
    add_model_flags(tr, s);
    add_train_flags(tr, s);

    CLI::App* ev = app.add_subcommand(
        "evaluate", "AUC and log loss of a checkpoint on an encoded dataset");
    ev->add_option("--checkpoint", s.checkpoint, "Model checkpoint")->required();
    ev->add_option("--data", s.data, "Encoded data")->required();
    ev->add_option("--vocab", s.vocab_path, "Vocabulary artifact")->required();

    CLI::App* pr = app.add_subcommand(
        "predict", "Per-sample probabilities of a checkpoint, one per line");
    pr->add_option("--checkpoint", s.checkpoint, "Model checkpoint")->required();
    pr->add_option("--data", s.data, "Encoded data")->required();
    pr->add_option("--vocab", s.vocab_path, "Vocabulary artifact")->required();
    pr->add_option("--out", s.out, "Output file (default: stdout)");

    CLI::App* gc = app.add_subcommand(
        "gradcheck",
        "Finite-difference audit of backprop on a small random instance");
    gc->add_option("--model", s.model, "Variant to audit");
    gc->add_option("--activation", s.activation, "relu, tanh, sigmoid, identity");
    gc->add_flag("--use-bn", s.use_bn, "Batch-normalize the deep input");
    gc->add_option("--seed", s.seed, "Instance seed");
    gc->add_option("--tolerance", tolerance, "Max relative error to pass");

    CLI::App* sw = app.add_subcommand(
        "sweep", "Train once per value of one hyperparameter and tabulate metrics");
    sw->add_option("--data", s.data, "Encoded training data")->required();
    sw->add_option("--vocab", s.vocab_path, "Vocabulary artifact")->required();
    sw->add_option("--key", sweep_key,
                   "embed-dim, interaction-dim, layers, neurons, alpha, "
                   "batch-size, dropout-keep, use-bn")
        ->required();
    sw->add_option("--values", sweep_values, "Comma-separated values")->required();
    sw->add_option("--eval", s.eval_path,
                   "Encoded eval data (default: training data)");
    sw->add_option("--out", s.out, "Also write the table here");
    add_model_flags(sw, s);
    add_train_flags(sw, s);

    // Config-file entries splice in as ordinary tokens; last occurrence wins.
    for (CLI::App* cmd : {pre, tr, ev, pr, gc, sw})
        for (CLI::Option* opt : cmd->get_options())
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        splice_config(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(pre)) return cmd_preprocess(pa);
        if (app.got_subcommand(tr)) return cmd_train(s);
        if (app.got_subcommand(ev)) return cmd_evaluate(s);
        if (app.got_subcommand(pr)) return cmd_predict(s);
        if (app.got_subcommand(gc)) return cmd_gradcheck(s, tolerance);
        if (app.got_subcommand(sw)) return cmd_sweep(s, sweep_key, sweep_values);
    } catch (const VerificationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
