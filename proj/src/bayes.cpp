#include "hetsched/bayes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hetsched/rng.hpp"

namespace hetsched {

namespace {

constexpr std::array<std::array<std::string_view, 3>, 4> kLevelNames{{
    {"Optimal", "Normal", "High"},
    {"Normal", "Pre-hypertension", "High Hypertension"},
    {"Normal", "Pre-hypertension", "High Hypertension"},
    {"Light", "Moderate", "Heavy"},
}};

constexpr std::array<std::string_view, 4> kFeatureNames{
    "total_cholesterol", "systolic_bp", "diastolic_bp", "smoking_rate"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.emplace_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_number(std::string_view s, double& out) {
    try {
        size_t pos = 0;
        std::string str(s);
        out = std::stod(str, &pos);
        return pos == str.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

std::array<int, kNumFeatures> CurrentState::indices() const {
    return {static_cast<int>(cholesterol), static_cast<int>(systolic),
            static_cast<int>(diastolic), static_cast<int>(smoking)};
}

CurrentState CurrentState::from_indices(
    const std::array<int, kNumFeatures>& idx) {
    for (int v : idx) {
        if (v < 0 || v >= kLevelsPerFeature) {
            throw std::invalid_argument("CurrentState: level index out of range");
        }
    }
    return CurrentState{static_cast<CholesterolLevel>(idx[0]),
                        static_cast<BpLevel>(idx[1]),
                        static_cast<BpLevel>(idx[2]),
                        static_cast<SmokingLevel>(idx[3])};
}

CurrentState discretize(const RawReadings& raw) {
    const double values[4] = {raw.cholesterol_mg_dl, raw.systolic_mmhg,
                              raw.diastolic_mmhg, raw.cigarettes_per_day};
    for (double v : values) {
        if (v < 0.0) {
            throw std::domain_error("discretize: negative reading");
        }
    }
    auto band = [](double v, double mid, double high) {
        return v >= high ? 2 : (v >= mid ? 1 : 0);
    };
    return CurrentState{
        static_cast<CholesterolLevel>(band(raw.cholesterol_mg_dl, 200, 240)),
        static_cast<BpLevel>(band(raw.systolic_mmhg, 120, 140)),
        static_cast<BpLevel>(band(raw.diastolic_mmhg, 80, 90)),
        static_cast<SmokingLevel>(band(raw.cigarettes_per_day, 11, 20))};
}

double TrainedClassifier::prior(bool stroke) const {
    // Additive smoothing over the two classes keeps single-class records
    // usable; at smoothing 0 this is the plain relative frequency.
    int c = stroke ? 1 : 0;
    return (class_count[c] + smoothing) / (total() + 2.0 * smoothing);
}

double TrainedClassifier::conditional(int feature, int level,
                                      bool stroke) const {
    int c = stroke ? 1 : 0;
    double denom = class_count[c] + smoothing * kLevelsPerFeature;
    if (denom == 0.0) return 0.0;  // smoothing 0 and an absent class
    return (counts[feature][level][c] + smoothing) / denom;
}

TrainedClassifier train(const MedicalRecord& record, double smoothing) {
    if (record.rows.empty()) {
        throw std::invalid_argument("train: empty medical record");
    }
    if (smoothing < 0.0) {
        throw std::invalid_argument("train: smoothing must be >= 0");
    }
    TrainedClassifier clf;
    clf.smoothing = smoothing;
    for (const auto& row : record.rows) {
        int c = row.stroke ? 1 : 0;
        ++clf.class_count[c];
        auto idx = row.state.indices();
        for (int f = 0; f < kNumFeatures; ++f) {
            ++clf.counts[f][idx[f]][c];
        }
    }
    return clf;
}

namespace {

// Unnormalized per-class score prior(c) * prod_i P(f_i | c).
double class_score(const TrainedClassifier& clf, const CurrentState& state,
                   bool stroke) {
    if (clf.class_count[stroke ? 1 : 0] == 0 && clf.smoothing == 0.0) {
        return 0.0;
    }
    double u = clf.prior(stroke);
    auto idx = state.indices();
    for (int f = 0; f < kNumFeatures; ++f) {
        u *= clf.conditional(f, idx[f], stroke);
    }
    return u;
}

} // namespace

StrokeLikelihood posterior(const TrainedClassifier& clf,
                           const CurrentState& state) {
    double u_yes = class_score(clf, state, true);
    double u_no = class_score(clf, state, false);
    double sum = u_yes + u_no;
    if (sum <= 0.0) {
        throw std::runtime_error(
            "posterior: both class scores are zero (degenerate training data "
            "with smoothing 0)");
    }
    return StrokeLikelihood{u_yes / sum};
}

bool classify(const TrainedClassifier& clf, const CurrentState& state) {
    return posterior(clf, state).delta >= 0.5;
}

EvaluationMetrics evaluate(const TrainedClassifier& clf,
                           const MedicalRecord& labeled) {
    if (labeled.rows.empty()) {
        throw std::invalid_argument("evaluate: empty record");
    }
    EvaluationMetrics m;
    for (const auto& row : labeled.rows) {
        bool pred = classify(clf, row.state);
        if (row.stroke) {
            pred ? ++m.true_positives : ++m.false_negatives;
        } else {
            pred ? ++m.false_positives : ++m.true_negatives;
        }
    }
    int pos = m.true_positives + m.false_negatives;
    int neg = m.false_positives + m.true_negatives;
    if (pos > 0) m.true_positive_rate = double(m.true_positives) / pos;
    if (neg > 0) m.false_positive_rate = double(m.false_positives) / neg;
    return m;
}

PriorityWeight priority(StrokeLikelihood delta, double alpha,
                        bool is_outpatient) {
    if (alpha < 0.0) {
        throw std::invalid_argument("priority: alpha must be >= 0");
    }
    PriorityWeight w;
    w.alpha = alpha;
    w.outpatient = is_outpatient;
    w.up = is_outpatient ? 1.0 + alpha * delta.delta : 1.0;
    return w;
}

const std::array<CurrentState, 7>& builtin_current_states() {
    using C = CholesterolLevel;
    using B = BpLevel;
    using S = SmokingLevel;
    static const std::array<CurrentState, 7> states{{
        {C::Normal, B::PreHypertension, B::Normal, S::Heavy},
        {C::High, B::HighHypertension, B::Normal, S::Light},
        {C::Normal, B::HighHypertension, B::HighHypertension, S::Moderate},
        {C::High, B::HighHypertension, B::HighHypertension, S::Heavy},
        {C::Normal, B::HighHypertension, B::PreHypertension, S::Light},
        {C::Normal, B::HighHypertension, B::HighHypertension, S::Light},
        {C::High, B::HighHypertension, B::HighHypertension, S::Light},
    }};
    return states;
}

std::string_view level_name(int feature, int level) {
    return kLevelNames.at(feature).at(level);
}

std::string_view feature_name(int feature) {
    return kFeatureNames.at(feature);
}

int parse_level(int feature, std::string_view name) {
    std::string needle = lower(trim(name));
    for (int lv = 0; lv < kLevelsPerFeature; ++lv) {
        if (needle == lower(kLevelNames.at(feature)[lv])) return lv;
    }
    throw std::invalid_argument("unknown level name '" + std::string(name) +
                                "' for feature " +
                                std::string(kFeatureNames.at(feature)));
}

MedicalRecord load_medical_record_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("medical record CSV: empty file");
    }
    auto header = split_csv_line(line);
    if (header.size() != 6 || lower(header[0]) != "day" ||
        lower(header[5]) != "stroke") {
        throw std::invalid_argument(
            "medical record CSV: expected header "
            "day,total_cholesterol,systolic_bp,diastolic_bp,"
            "cigarettes_per_day,stroke");
    }
    MedicalRecord record;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 6) {
            throw std::invalid_argument("medical record CSV: line " +
                                        std::to_string(line_no) +
                                        ": expected 6 fields");
        }
        MedicalRecordRow row;
        row.day = static_cast<int>(std::stol(fields[0]));
        double nums[4];
        bool numeric = true;
        for (int f = 0; f < kNumFeatures; ++f) {
            if (!parse_number(fields[f + 1], nums[f])) {
                numeric = false;
                break;
            }
        }
        if (numeric) {
            row.state = discretize(
                RawReadings{nums[0], nums[1], nums[2], nums[3]});
        } else {
            std::array<int, kNumFeatures> idx{};
            for (int f = 0; f < kNumFeatures; ++f) {
                idx[f] = parse_level(f, fields[f + 1]);
            }
            row.state = CurrentState::from_indices(idx);
        }
        std::string cls = lower(fields[5]);
        if (cls == "yes") {
            row.stroke = true;
        } else if (cls == "no") {
            row.stroke = false;
        } else {
            throw std::invalid_argument("medical record CSV: line " +
                                        std::to_string(line_no) +
                                        ": stroke must be yes or no");
        }
        record.rows.push_back(row);
    }
    if (record.rows.size() < 2) {
        throw std::invalid_argument(
            "medical record CSV: a record needs at least 2 rows");
    }
    return record;
}

MedicalRecord load_medical_record_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open medical record: " + path);
    }
    return load_medical_record_csv(in);
}

std::string classifier_to_json(const TrainedClassifier& clf) {
    nlohmann::ordered_json j;
    j["rows"] = clf.total();
    j["smoothing"] = clf.smoothing;
    j["class_counts"] = {{"no", clf.class_count[0]},
                         {"yes", clf.class_count[1]}};
    j["priors"] = {{"no", clf.prior(false)}, {"yes", clf.prior(true)}};
    nlohmann::ordered_json cond;
    for (int f = 0; f < kNumFeatures; ++f) {
        nlohmann::ordered_json levels;
        for (int lv = 0; lv < kLevelsPerFeature; ++lv) {
            levels[std::string(level_name(f, lv))] = {
                {"count_no", clf.counts[f][lv][0]},
                {"count_yes", clf.counts[f][lv][1]},
                {"p_no", clf.conditional(f, lv, false)},
                {"p_yes", clf.conditional(f, lv, true)},
            };
        }
        cond[std::string(feature_name(f))] = levels;
    }
    j["conditionals"] = cond;
    return j.dump(2);
}

MedicalRecord synthetic_record(std::uint64_t seed, int days) {
    if (days < 2) {
        throw std::invalid_argument("synthetic_record: need at least 2 days");
    }
    std::mt19937_64 rng(seed);
    MedicalRecord record;
    record.rows.reserve(days);
    for (int day = 1; day <= days; ++day) {
        std::array<int, kNumFeatures> idx{};
        int score = 0;
        for (int f = 0; f < kNumFeatures; ++f) {
            double u = uniform_unit(rng);
            idx[f] = u < 0.35 ? 0 : (u < 0.70 ? 1 : 2);
            score += idx[f];
        }
        // Label correlates with how elevated the readings are; the offsets
        // keep both labels reachable from any state.
        double p_yes = (score + 0.5) / 9.0;
        MedicalRecordRow row;
        row.day = day;
        row.state = CurrentState::from_indices(idx);
        row.stroke = uniform_unit(rng) < p_yes;
        record.rows.push_back(row);
    }
    return record;
}

} // namespace hetsched
