#include "finn/data.hpp"

#include "finn/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace finn {
namespace {

const char* kind_name(FieldKind k) {
    return k == FieldKind::categorical ? "categorical" : "numerical";
}

FieldKind parse_kind(const std::string& s) {
    if (s == "categorical") return FieldKind::categorical;
    if (s == "numerical") return FieldKind::numerical;
    throw std::runtime_error("unknown field kind '" + s + "'");
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// FeatureSchema

FeatureSchema::FeatureSchema(std::vector<FieldSpec> fields)
    : fields_(std::move(fields)) {
    if (fields_.size() < 2)
        throw std::invalid_argument("schema needs at least 2 fields, got " +
                                    std::to_string(fields_.size()));
    for (const auto& f : fields_) {
        if (f.name.empty())
            throw std::invalid_argument("schema field with empty name");
        if (f.name.find_first_of("\t\n\r :,") != std::string::npos)
            throw std::invalid_argument("field name '" + f.name +
                                        "' contains a reserved character");
    }
    for (std::size_t i = 0; i < fields_.size(); ++i)
        for (std::size_t j = i + 1; j < fields_.size(); ++j)
            if (fields_[i].name == fields_[j].name)
                throw std::invalid_argument("duplicate field name '" +
                                            fields_[i].name + "'");
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file " + path);
    std::vector<FieldSpec> fields;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string name, kind;
        if (!(ss >> name >> kind))
            throw std::runtime_error("schema line '" + line +
                                     "' is not `name kind`");
        std::string extra;
        if (ss >> extra)
            throw std::runtime_error("schema line '" + line +
                                     "' has trailing tokens");
        fields.push_back({name, parse_kind(kind)});
    }
    return FeatureSchema(std::move(fields));
}

std::uint64_t FeatureSchema::hash() const {
    std::string blob;
    for (const auto& f : fields_) {
        blob += f.name;
        blob += '\t';
        blob += kind_name(f.kind);
        blob += '\n';
    }
    return fnv1a(blob);
}

// ---------------------------------------------------------------------------
// Buckets

BucketSpec fit_buckets(std::vector<double> values, std::size_t n_buckets) {
    if (values.empty()) throw std::invalid_argument("fit_buckets: no values");
    if (n_buckets == 0) throw std::invalid_argument("fit_buckets: n_buckets = 0");
    std::sort(values.begin(), values.end());
    BucketSpec spec;
    const std::size_t n = values.size();
    for (std::size_t b = 1; b < n_buckets; ++b) {
        // Cut between ranks so each bucket holds ~n/n_buckets values.
        std::size_t cut = b * n / n_buckets;
        if (cut == 0 || cut >= n) continue;
        double lo = values[cut - 1], hi = values[cut];
        double boundary;
        if (lo < hi) {
            boundary = lo + (hi - lo) / 2.0;  // lands in (lo, hi] once rounded
            if (boundary <= lo) boundary = hi;
        } else {
            // Cut inside a tie run: the whole run goes to the upper bucket.
            boundary = lo;
        }
        // Keep only boundaries that separate values; merging duplicates keeps
        // the list strictly increasing (realized buckets may be < n_buckets).
        if (boundary > values.front() &&
            (spec.boundaries.empty() || boundary > spec.boundaries.back()))
            spec.boundaries.push_back(boundary);
    }
    return spec;
}

std::size_t bucket_index(const BucketSpec& spec, double value) {
    // Bucket = number of boundaries <= value.
    auto it = std::upper_bound(spec.boundaries.begin(), spec.boundaries.end(),
                               value);
    return static_cast<std::size_t>(it - spec.boundaries.begin());
}

// ---------------------------------------------------------------------------
// Vocabulary

void Vocabulary::assign_bases() {
    std::size_t base = 0;
    for (auto& f : fields_) {
        f.base = base;
        base += f.count;
    }
    n_ = base;
}

std::size_t Vocabulary::oov_index(std::size_t f) const {
    if (schema_.field(f).kind != FieldKind::categorical)
        throw std::invalid_argument("field '" + schema_.field(f).name +
                                    "' is numerical and has no OOV index");
    return fields_[f].base + fields_[f].count - 1;
}

std::size_t Vocabulary::category_index(std::size_t f,
                                       const std::string& value) const {
    const auto& entry = fields_[f];
    auto it = entry.categories.find(value);
    if (it == entry.categories.end()) return oov_index(f);
    return entry.base + it->second;
}

Vocabulary build_vocabulary(const std::vector<RawRecord>& records,
                            const FeatureSchema& schema, std::size_t min_count,
                            std::size_t n_buckets) {
    if (records.empty())
        throw std::invalid_argument("build_vocabulary: empty record stream");
    if (n_buckets == 0)
        throw std::invalid_argument("build_vocabulary: n_buckets = 0");
    const std::size_t m = schema.field_count();
    for (const auto& r : records)
        if (r.size() != m)
            throw std::invalid_argument(
                "record with " + std::to_string(r.size()) + " values misses field '" +
                schema.field(std::min(r.size(), m - 1)).name + "'");

    Vocabulary vocab;
    vocab.schema_ = schema;
    vocab.min_count_ = min_count;
    vocab.fields_.resize(m);
    for (std::size_t f = 0; f < m; ++f) {
        auto& entry = vocab.fields_[f];
        if (schema.field(f).kind == FieldKind::categorical) {
            // Ordered map so retained categories get indices in lexicographic
            // order — the artifact is canonical independent of input order.
            std::map<std::string, std::size_t> freq;
            for (const auto& r : records) ++freq[r[f]];
            std::size_t local = 0;
            for (const auto& [cat, count] : freq)
                if (count >= min_count) entry.categories.emplace(cat, local++);
            entry.count = local + 1;  // +1 for the OOV slot
        } else {
            std::vector<double> values;
            values.reserve(records.size());
            for (const auto& r : records)
                values.push_back(parse_double(r[f], "field '" + schema.field(f).name + "'"));
            entry.buckets = fit_buckets(std::move(values), n_buckets);
            entry.count = entry.buckets.bucket_count();
        }
    }
    vocab.assign_bases();
    return vocab;
}

EncodedSample encode(const RawRecord& record, std::uint8_t label,
                     const Vocabulary& vocab) {
    const auto& schema = vocab.schema();
    if (record.size() != schema.field_count())
        throw std::invalid_argument(
            "record has " + std::to_string(record.size()) + " values, schema has " +
            std::to_string(schema.field_count()) + " fields");
    if (label > 1) throw std::invalid_argument("label must be 0 or 1");
    EncodedSample sample;
    sample.label = label;
    sample.indices.reserve(record.size());
    for (std::size_t f = 0; f < record.size(); ++f) {
        std::size_t idx;
        if (schema.field(f).kind == FieldKind::categorical) {
            idx = vocab.category_index(f, record[f]);
        } else {
            double v = parse_double(record[f], "field '" + schema.field(f).name + "'");
            idx = vocab.field_base(f) + bucket_index(vocab.buckets(f), v);
        }
        sample.indices.push_back(static_cast<std::uint32_t>(idx));
    }
    return sample;
}

// ---------------------------------------------------------------------------
// Artifact serialization

std::string Vocabulary::serialize() const {
    std::string out = "finn-vocab\tv1\tschema=";
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(schema_.hash()));
    out += hex;
    out += "\tmin_count=" + std::to_string(min_count_);
    out += "\tn=" + std::to_string(n_);
    out += "\tfields=";
    for (std::size_t f = 0; f < schema_.field_count(); ++f) {
        if (f) out += ',';
        out += schema_.field(f).name;
        out += ':';
        out += kind_name(schema_.field(f).kind);
    }
    out += '\n';
    for (std::size_t f = 0; f < schema_.field_count(); ++f) {
        const auto& entry = fields_[f];
        const auto& name = schema_.field(f).name;
        if (schema_.field(f).kind == FieldKind::categorical) {
            std::vector<std::pair<std::size_t, const std::string*>> rows;
            rows.reserve(entry.categories.size());
            for (const auto& [cat, local] : entry.categories)
                rows.emplace_back(local, &cat);
            std::sort(rows.begin(), rows.end());
            for (const auto& [local, cat] : rows)
                out += name + '\t' + *cat + '\t' +
                       std::to_string(entry.base + local) + '\n';
        } else {
            for (std::size_t b = 0; b < entry.buckets.boundaries.size(); ++b)
                out += name + '\t' + std::to_string(b) + '\t' +
                       format_double(entry.buckets.boundaries[b]) + '\n';
        }
    }
    return out;
}

Vocabulary Vocabulary::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("vocabulary artifact: empty file");
    auto head = split_line(strip_cr(line), '\t');
    if (head.size() != 6 || head[0] != "finn-vocab" || head[1] != "v1")
        throw std::runtime_error("vocabulary artifact: bad header");
    auto expect = [&](const std::string& token,
                      const char* key) -> std::string {
        std::string prefix = std::string(key) + "=";
        if (token.rfind(prefix, 0) != 0)
            throw std::runtime_error("vocabulary artifact: expected " + prefix +
                                     "..., got '" + token + "'");
        return token.substr(prefix.size());
    };
    const std::string schema_hex = expect(head[2], "schema");
    const std::size_t min_count = parse_size(expect(head[3], "min_count"), "min_count");
    const std::size_t n = parse_size(expect(head[4], "n"), "n");

    std::vector<FieldSpec> fields;
    for (const auto& tok : split_line(expect(head[5], "fields"), ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("vocabulary artifact: bad field entry '" +
                                     tok + "'");
        fields.push_back({tok.substr(0, colon), parse_kind(tok.substr(colon + 1))});
    }
    Vocabulary vocab;
    vocab.schema_ = FeatureSchema(std::move(fields));
    vocab.min_count_ = min_count;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(vocab.schema_.hash()));
    if (schema_hex != hex)
        throw std::runtime_error("vocabulary artifact: schema hash mismatch");

    const std::size_t m = vocab.schema_.field_count();
    vocab.fields_.resize(m);
    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t f = 0; f < m; ++f) by_name[vocab.schema_.field(f).name] = f;

    // Collect rows per field; global indices are validated after bases are known.
    std::vector<std::vector<std::pair<std::string, std::size_t>>> cat_rows(m);
    std::vector<std::vector<std::pair<std::size_t, double>>> bound_rows(m);
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cols = split_line(line, '\t');
        if (cols.size() != 3)
            throw std::runtime_error("vocabulary artifact: bad row '" + line + "'");
        auto it = by_name.find(cols[0]);
        if (it == by_name.end())
            throw std::runtime_error("vocabulary artifact: unknown field '" +
                                     cols[0] + "'");
        std::size_t f = it->second;
        if (vocab.schema_.field(f).kind == FieldKind::categorical)
            cat_rows[f].emplace_back(cols[1], parse_size(cols[2], "feature index"));
        else
            bound_rows[f].emplace_back(parse_size(cols[1], "bucket ordinal"),
                                       parse_double(cols[2], "field '" + cols[0] + "'"));
    }

    for (std::size_t f = 0; f < m; ++f) {
        auto& entry = vocab.fields_[f];
        if (vocab.schema_.field(f).kind == FieldKind::categorical) {
            entry.count = cat_rows[f].size() + 1;
        } else {
            std::sort(bound_rows[f].begin(), bound_rows[f].end());
            for (std::size_t b = 0; b < bound_rows[f].size(); ++b) {
                if (bound_rows[f][b].first != b)
                    throw std::runtime_error(
                        "vocabulary artifact: bucket ordinals of field '" +
                        vocab.schema_.field(f).name + "' are not 0..B-1");
                double v = bound_rows[f][b].second;
                if (b && v <= entry.buckets.boundaries.back())
                    throw std::runtime_error(
                        "vocabulary artifact: boundaries of field '" +
                        vocab.schema_.field(f).name + "' not increasing");
                entry.buckets.boundaries.push_back(v);
            }
            entry.count = entry.buckets.bucket_count();
        }
    }
    vocab.assign_bases();
    if (vocab.n_ != n)
        throw std::runtime_error("vocabulary artifact: header says n=" +
                                 std::to_string(n) + " but rows describe n=" +
                                 std::to_string(vocab.n_));
    for (std::size_t f = 0; f < m; ++f) {
        auto& entry = vocab.fields_[f];
        for (const auto& [cat, global] : cat_rows[f]) {
            if (global < entry.base || global >= entry.base + entry.count - 1)
                throw std::runtime_error(
                    "vocabulary artifact: index " + std::to_string(global) +
                    " outside the range of field '" + vocab.schema_.field(f).name +
                    "'");
            if (!entry.categories.emplace(cat, global - entry.base).second)
                throw std::runtime_error("vocabulary artifact: duplicate category '" +
                                         cat + "'");
        }
        // Denseness: every local slot below OOV is taken exactly once.
        std::vector<bool> seen(entry.count - 1, false);
        for (const auto& [cat, local] : entry.categories) {
            if (seen[local])
                throw std::runtime_error(
                    "vocabulary artifact: duplicate feature index in field '" +
                    vocab.schema_.field(f).name + "'");
            seen[local] = true;
        }
    }
    return vocab;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write vocabulary to " + path);
    out << serialize();
    if (!out) throw std::runtime_error("short write to " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open vocabulary file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

std::uint64_t Vocabulary::fingerprint() const { return fnv1a(serialize()); }

// ---------------------------------------------------------------------------
// Dataset shaping

Dataset downsample_negatives(const Dataset& dataset, double target_pos_ratio,
                             Rng& rng) {
    if (!(target_pos_ratio > 0.0 && target_pos_ratio < 1.0))
        throw std::invalid_argument("target_pos_ratio must be in (0,1)");
    std::vector<std::size_t> neg_positions;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].label) ++positives;
        else neg_positions.push_back(i);
    }
    if (positives == 0 || neg_positions.empty())
        throw std::invalid_argument(
            "downsampling needs both classes present (got " +
            std::to_string(positives) + " positives, " +
            std::to_string(neg_positions.size()) + " negatives)");

    // Exact negative count hitting the target ratio: P/(P+k) = target.
    auto keep = static_cast<std::size_t>(std::llround(
        positives * (1.0 - target_pos_ratio) / target_pos_ratio));
    if (keep >= neg_positions.size()) return dataset;

    shuffle(neg_positions, rng);
    std::vector<bool> kept(dataset.size(), false);
    for (std::size_t i = 0; i < keep; ++i) kept[neg_positions[i]] = true;
    Dataset out;
    out.reserve(positives + keep);
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (dataset[i].label || kept[i]) out.push_back(dataset[i]);
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  Rng& rng, SplitMode mode) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split fraction must be in (0,1)");
    if (dataset.size() < 2)
        throw std::invalid_argument("cannot split fewer than 2 samples");
    const std::size_t size = dataset.size();
    auto cut = static_cast<std::size_t>(std::llround(fraction * size));
    cut = std::clamp<std::size_t>(cut, 1, size - 1);

    std::vector<std::size_t> order(size);
    for (std::size_t i = 0; i < size; ++i) order[i] = i;
    if (mode == SplitMode::random) shuffle(order, rng);

    std::pair<Dataset, Dataset> out;
    out.first.reserve(cut);
    out.second.reserve(size - cut);
    for (std::size_t i = 0; i < size; ++i)
        (i < cut ? out.first : out.second).push_back(dataset[order[i]]);
    return out;
}

std::vector<Batch> make_batches(const Dataset& dataset, std::size_t batch_size,
                                bool shuffle_samples, Rng& rng) {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (shuffle_samples) shuffle(order, rng);

    std::vector<Batch> batches;
    batches.reserve((dataset.size() + batch_size - 1) / batch_size);
    for (std::size_t start = 0; start < dataset.size(); start += batch_size) {
        Batch b;
        const std::size_t stop = std::min(start + batch_size, dataset.size());
        b.samples.reserve(stop - start);
        for (std::size_t i = start; i < stop; ++i)
            b.samples.push_back(dataset[order[i]]);
        batches.push_back(std::move(b));
    }
    return batches;
}

// ---------------------------------------------------------------------------
// File I/O

RawTable read_raw_table(std::istream& in, const FeatureSchema& schema,
                        char delimiter) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("raw input: missing header line");
    auto header = split_line(strip_cr(line), delimiter);
    std::unordered_map<std::string, std::size_t> columns;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (!columns.emplace(header[c], c).second)
            throw std::runtime_error("raw input: duplicate column '" + header[c] +
                                     "'");
    auto label_it = columns.find("label");
    if (label_it == columns.end())
        throw std::runtime_error("raw input: no `label` column in header");
    const std::size_t label_col = label_it->second;

    std::vector<std::size_t> field_cols;
    for (const auto& f : schema.fields()) {
        auto it = columns.find(f.name);
        if (it == columns.end())
            throw std::runtime_error("raw input: header lacks field '" + f.name +
                                     "'");
        field_cols.push_back(it->second);
    }

    RawTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cols = split_line(line, delimiter);
        if (cols.size() != header.size())
            throw std::runtime_error(
                "raw input line " + std::to_string(line_no) + ": expected " +
                std::to_string(header.size()) + " columns, got " +
                std::to_string(cols.size()));
        const std::string& label = cols[label_col];
        if (label != "0" && label != "1")
            throw std::runtime_error("raw input line " + std::to_string(line_no) +
                                     ": label '" + label + "' is not 0/1");
        RawRecord record;
        record.reserve(field_cols.size());
        for (std::size_t c : field_cols) record.push_back(cols[c]);
        table.records.push_back(std::move(record));
        table.labels.push_back(label == "1" ? 1 : 0);
    }
    return table;
}

RawTable read_raw_file(const std::string& path, const FeatureSchema& schema,
                       char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open raw input " + path);
    return read_raw_table(in, schema, delimiter);
}

void save_dataset(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset to " + path);
    for (const auto& s : dataset) {
        out << unsigned(s.label) << '\t';
        for (std::size_t i = 0; i < s.indices.size(); ++i) {
            if (i) out << ',';
            out << s.indices[i];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset " + path);
    Dataset out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cols = split_line(line, '\t');
        if (cols.size() != 2)
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": expected `label<TAB>indices`");
        if (cols[0] != "0" && cols[0] != "1")
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": label '" + cols[0] + "' is not 0/1");
        EncodedSample s;
        s.label = cols[0] == "1" ? 1 : 0;
        for (const auto& tok : split_line(cols[1], ','))
            s.indices.push_back(
                static_cast<std::uint32_t>(parse_size(tok, "feature index")));
        if (s.indices.empty())
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": no feature indices");
        if (!out.empty() && s.indices.size() != out.front().indices.size())
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": field count differs from first line");
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace finn
