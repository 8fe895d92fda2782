#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetsched {

// The four sensor features and their discretized levels. Every feature has
// exactly three levels; the names differ per feature.
enum class CholesterolLevel { Optimal = 0, Normal = 1, High = 2 };
enum class BpLevel { Normal = 0, PreHypertension = 1, HighHypertension = 2 };
enum class SmokingLevel { Light = 0, Moderate = 1, Heavy = 2 };

inline constexpr int kNumFeatures = 4;
inline constexpr int kLevelsPerFeature = 3;

// One vector of current sensor readings after discretization:
// (total cholesterol, systolic BP, diastolic BP, smoking rate).
struct CurrentState {
    CholesterolLevel cholesterol = CholesterolLevel::Optimal;
    BpLevel systolic = BpLevel::Normal;
    BpLevel diastolic = BpLevel::Normal;
    SmokingLevel smoking = SmokingLevel::Light;

    std::array<int, kNumFeatures> indices() const;
    static CurrentState from_indices(const std::array<int, kNumFeatures>& idx);

    bool operator==(const CurrentState&) const = default;
};

// Raw (pre-discretization) sensor readings.
struct RawReadings {
    double cholesterol_mg_dl = 0.0;
    double systolic_mmhg = 0.0;
    double diastolic_mmhg = 0.0;
    double cigarettes_per_day = 0.0;
};

struct MedicalRecordRow {
    int day = 0;
    CurrentState state;
    bool stroke = false;
};

// An outpatient's observation history, one row per day.
struct MedicalRecord {
    std::vector<MedicalRecordRow> rows;
};

// Categorical naive Bayes model over the four features and the binary
// stroke class. Stores raw counts; smoothed probabilities are computed on
// query. Immutable once trained.
struct TrainedClassifier {
    std::array<int, 2> class_count{0, 0};  // [no, yes]
    // counts[feature][level][class]
    std::array<std::array<std::array<int, 2>, kLevelsPerFeature>, kNumFeatures>
        counts{};
    double smoothing = 1.0;

    int total() const { return class_count[0] + class_count[1]; }
    double prior(bool stroke) const;
    double conditional(int feature, int level, bool stroke) const;
};

// The normalized two-class posterior of class "yes" for a current state.
struct StrokeLikelihood {
    double delta = 0.0;
};

// The scheduling weight of one user: 1 for normal users, 1 + alpha * delta
// for outpatients.
struct PriorityWeight {
    double up = 1.0;
    double alpha = 0.0;
    bool outpatient = false;
};

struct EvaluationMetrics {
    int true_positives = 0;
    int false_positives = 0;
    int true_negatives = 0;
    int false_negatives = 0;
    // Undefined when the record has no rows of the relevant class.
    std::optional<double> true_positive_rate;
    std::optional<double> false_positive_rate;
};

// Maps raw readings onto the discretization bands. Band boundaries are
// inclusive on their lower edge; a smoking rate below 1/day (including
// non-smokers) falls into the lightest band, which has no lower bound of
// its own. Throws std::domain_error for negative readings.
CurrentState discretize(const RawReadings& raw);

// Counts class and (feature, level, class) frequencies. Throws
// std::invalid_argument for an empty record or negative smoothing.
TrainedClassifier train(const MedicalRecord& record, double smoothing = 1.0);

// delta = u(yes) / (u(yes) + u(no)) with u(c) = prior(c) * prod_i
// P(f_i | c). Throws std::runtime_error when both unnormalized terms are
// zero (possible only with smoothing 0 on degenerate training data).
StrokeLikelihood posterior(const TrainedClassifier& clf,
                           const CurrentState& state);

// true = stroke predicted. Ties at delta = 0.5 classify as positive.
bool classify(const TrainedClassifier& clf, const CurrentState& state);

EvaluationMetrics evaluate(const TrainedClassifier& clf,
                           const MedicalRecord& labeled);

// Throws std::invalid_argument for alpha < 0.
PriorityWeight priority(StrokeLikelihood delta, double alpha,
                        bool is_outpatient);

// The seven built-in outpatient current states, in order.
const std::array<CurrentState, 7>& builtin_current_states();

// Level-name helpers for text I/O. parse_level is case-insensitive and
// throws std::invalid_argument for unknown names.
std::string_view level_name(int feature, int level);
int parse_level(int feature, std::string_view name);
std::string_view feature_name(int feature);

// CSV ingestion. Header: day,total_cholesterol,systolic_bp,diastolic_bp,
// cigarettes_per_day,stroke. Rows carry either numeric readings (which are
// discretized on load) or pre-discretized level names. Throws
// std::invalid_argument on malformed input or fewer than two rows.
MedicalRecord load_medical_record_csv(std::istream& in);
MedicalRecord load_medical_record_csv(const std::string& path);

// Priors and count tables as a JSON document, for inspection.
std::string classifier_to_json(const TrainedClassifier& clf);

// Deterministic schema-compatible stand-in for a real observation history:
// levels drawn at random, labels correlated with how bad the levels are.
MedicalRecord synthetic_record(std::uint64_t seed, int days = 30);

} // namespace hetsched
