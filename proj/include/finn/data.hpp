#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "finn/tensor.hpp"

namespace finn {

enum class FieldKind { categorical, numerical };

struct FieldSpec {
    std::string name;
    FieldKind kind = FieldKind::categorical;
};

/// Ordered field layout of the raw data. At least two fields are required
/// (the interaction layers operate on field pairs) and names must be unique.
class FeatureSchema {
public:
    explicit FeatureSchema(std::vector<FieldSpec> fields);

    /// Text file, one `name <tab-or-space> kind` line per field, `#` comments.
    static FeatureSchema load(const std::string& path);

    std::size_t field_count() const { return fields_.size(); }
    const FieldSpec& field(std::size_t i) const { return fields_[i]; }
    const std::vector<FieldSpec>& fields() const { return fields_; }

    /// FNV-1a over names and kinds; identifies the schema in artifacts.
    std::uint64_t hash() const;

private:
    std::vector<FieldSpec> fields_;
};

/// Field values of one raw record, aligned with the schema order.
using RawRecord = std::vector<std::string>;

/// Sorted internal boundaries for equal-frequency discretization of one
/// numerical field. B boundaries define B+1 buckets; value v falls in
/// bucket #{boundaries <= v}.
struct BucketSpec {
    std::vector<double> boundaries;
    std::size_t bucket_count() const { return boundaries.size() + 1; }
};

/// Boundaries at the empirical i/n_buckets quantiles. Duplicate cut values
/// are merged, so the realized bucket count may be smaller than requested.
BucketSpec fit_buckets(std::vector<double> values, std::size_t n_buckets);

std::size_t bucket_index(const BucketSpec& spec, double value);

/// One training instance: the active feature index of each field plus the
/// binary click label.
struct EncodedSample {
    std::vector<std::uint32_t> indices;
    std::uint8_t label = 0;

    bool operator==(const EncodedSample&) const = default;
};

using Dataset = std::vector<EncodedSample>;

struct Batch {
    std::vector<EncodedSample> samples;
    std::size_t size() const { return samples.size(); }
};

/// Immutable encoder artifact: per-field category->index maps with one OOV
/// index per categorical field, plus fitted bucket boundaries for numerical
/// fields. Feature indices are dense in [0, n) and each field owns a
/// contiguous range.
class Vocabulary {
public:
    Vocabulary() = default;

    std::size_t feature_count() const { return n_; }         // n
    std::size_t field_count() const { return schema_.field_count(); }  // m
    std::size_t min_count() const { return min_count_; }
    const FeatureSchema& schema() const { return schema_; }

    std::size_t field_base(std::size_t f) const { return fields_[f].base; }
    std::size_t field_feature_count(std::size_t f) const { return fields_[f].count; }
    /// OOV index of a categorical field (last index of its range).
    std::size_t oov_index(std::size_t f) const;
    const BucketSpec& buckets(std::size_t f) const { return fields_[f].buckets; }
    std::size_t retained_category_count(std::size_t f) const {
        return fields_[f].categories.size();
    }

    /// Feature index for a categorical value (OOV fallback for unknowns).
    std::size_t category_index(std::size_t f, const std::string& value) const;

    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);
    std::string serialize() const;
    static Vocabulary deserialize(const std::string& text);

    /// FNV-1a over the canonical serialization; checkpoints store it so a
    /// model can refuse evaluation against incompatible artifacts.
    std::uint64_t fingerprint() const;

    friend Vocabulary build_vocabulary(const std::vector<RawRecord>& records,
                                       const FeatureSchema& schema,
                                       std::size_t min_count, std::size_t n_buckets);

private:
    struct FieldEntry {
        std::size_t base = 0;
        std::size_t count = 0;  // features owned by the field, incl. OOV
        std::unordered_map<std::string, std::size_t> categories;  // local index
        BucketSpec buckets;
    };

    FeatureSchema schema_{std::vector<FieldSpec>{
        {"a", FieldKind::categorical}, {"b", FieldKind::categorical}}};
    std::vector<FieldEntry> fields_;
    std::size_t n_ = 0;
    std::size_t min_count_ = 0;

    void assign_bases();
};

/// Fit the encoder on a corpus: categories seen fewer than min_count times
/// map to their field's OOV index, retained categories get dense indices in
/// lexicographic order, and numerical fields are discretized into at most
/// n_buckets equal-frequency buckets.
Vocabulary build_vocabulary(const std::vector<RawRecord>& records,
                            const FeatureSchema& schema, std::size_t min_count,
                            std::size_t n_buckets);

/// Encode one raw record against a fitted vocabulary.
EncodedSample encode(const RawRecord& record, std::uint8_t label,
                     const Vocabulary& vocab);

/// Keep every positive and subsample negatives uniformly (exact count,
/// seeded) until the positive ratio reaches the target. A dataset already at
/// or above the target ratio is returned unchanged. Input order is kept.
Dataset downsample_negatives(const Dataset& dataset, double target_pos_ratio,
                             Rng& rng);

enum class SplitMode { random, sequential };

/// Disjoint (train, test) cover of the dataset. Sequential mode cuts at
/// round(fraction * size) preserving input order; random mode cuts a seeded
/// permutation.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                  Rng& rng, SplitMode mode);

/// One epoch of batches. Every sample appears exactly once; the final batch
/// may be short. Shuffling is a seeded permutation of the dataset.
std::vector<Batch> make_batches(const Dataset& dataset, std::size_t batch_size,
                                bool shuffle_samples, Rng& rng);

/// Delimited text reader: first line is a header naming the columns, one of
/// which must be `label` (0/1); every schema field must be present. Extra
/// columns are ignored.
struct RawTable {
    std::vector<RawRecord> records;  // schema-ordered field values
    std::vector<std::uint8_t> labels;
};

RawTable read_raw_table(std::istream& in, const FeatureSchema& schema,
                        char delimiter);
RawTable read_raw_file(const std::string& path, const FeatureSchema& schema,
                       char delimiter);

/// Encoded dataset file: `label<TAB>idx0,idx1,...,idx{m-1}` per line.
void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

/// FNV-1a 64-bit.
std::uint64_t fnv1a(const std::string& text);

}  // namespace finn
