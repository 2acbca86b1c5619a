#include "evtab/synthetic.hpp"

#include <array>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

namespace evtab {

std::string_view to_string(NoiseLevel n) {
  switch (n) {
    case NoiseLevel::Zero: return "zero";
    case NoiseLevel::Low: return "low";
    case NoiseLevel::Medium: return "medium";
    case NoiseLevel::High: return "high";
  }
  return "zero";
}

std::optional<NoiseLevel> noise_from_string(std::string_view s) {
  for (auto n : {NoiseLevel::Zero, NoiseLevel::Low, NoiseLevel::Medium, NoiseLevel::High}) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

NoiseConfig NoiseConfig::preset(NoiseLevel level) {
  NoiseConfig c;
  switch (level) {
    case NoiseLevel::Zero:
      break;
    case NoiseLevel::Low:
      c.secondary_min = 0;
      c.secondary_max = 1;
      c.results_preamble = 0.3;
      c.secondary_same_type = 0.3;
      c.baseline_distractor = 0.5;
      c.context_numerics = 0.2;
      c.difference_sentence = 0.3;
      c.lexical_variation = 0.3;
      break;
    case NoiseLevel::Medium:
      c.secondary_min = 1;
      c.secondary_max = 2;
      c.results_preamble = 0.5;
      c.secondary_same_type = 0.4;
      c.baseline_distractor = 0.8;
      c.context_numerics = 0.5;
      c.difference_sentence = 0.5;
      c.lexical_variation = 0.6;
      break;
    case NoiseLevel::High:
      c.secondary_min = 1;
      c.secondary_max = 3;
      c.results_preamble = 0.7;
      c.secondary_same_type = 0.5;
      c.baseline_distractor = 1.0;
      c.context_numerics = 1.0;
      c.difference_sentence = 0.8;
      c.lexical_variation = 0.9;
      break;
  }
  return c;
}

namespace {

constexpr std::array<std::string_view, 12> kDrugs = {
    "latanoprost", "timolol",  "bimatoprost", "travoprost",  "tafluprost", "brimonidine",
    "dorzolamide", "brinzolamide", "betaxolol", "carteolol", "unoprostone", "placebo"};
constexpr std::array<std::string_view, 5> kSurgeries = {
    "trabeculectomy", "phacoemulsification", "phacotrabeculectomy", "viscocanalostomy",
    "canaloplasty"};
constexpr std::array<std::string_view, 5> kDiseases = {
    "primary open-angle glaucoma", "ocular hypertension", "normal tension glaucoma",
    "pseudoexfoliation glaucoma", "chronic angle-closure glaucoma"};
constexpr std::array<std::string_view, 4> kPatientHeads = {"patients", "subjects", "participants",
                                                           "individuals"};

// Outcome phrase split into modifier and head word.
struct Outcome {
  std::string_view prefix;
  std::string_view head;
};
constexpr std::array<Outcome, 5> kPrimaryOutcomes = {{
    {"Mean intraocular pressure (IOP)", "changes"},
    {"Mean diurnal intraocular pressure", "reduction"},
    {"The mean IOP", "decrease"},
    {"Mean intraocular pressure", "changes"},
    {"The average IOP", "reduction"},
}};
constexpr std::array<Outcome, 6> kSecondaryOutcomes = {{
    {"Mean central corneal thickness", "changes"},
    {"The mean visual field", "deviation"},
    {"Mean conjunctival hyperemia", "scores"},
    {"Mean best corrected visual acuity", "changes"},
    {"The mean endothelial cell", "loss"},
    {"Mean retinal nerve fiber layer", "thinning"},
}};

enum class Quantity { Meas, Perc, Frac };

class Writer {
 public:
  Writer(std::uint64_t seed, const NoiseConfig& noise) : rng_(seed), noise_(noise) {}

  Abstract abstract(std::size_t index) {
    const bool surgical = chance(0.25);
    std::string arm1, arm2;
    if (surgical) {
      arm1 = pick(kSurgeries);
      do arm2 = pick(kSurgeries); while (arm2 == arm1);
    } else {
      // Placebo only ever appears as the second arm.
      do arm1 = pick(kDrugs); while (arm1 == "placebo");
      do arm2 = pick(kDrugs); while (arm2 == arm1);
    }
    const std::string disease(pick(kDiseases));
    const std::string patients(varied(kPatientHeads));
    const int weeks = 2 + static_cast<int>(uniform(11));
    const Outcome primary = pick(kPrimaryOutcomes);
    const Quantity quantity = static_cast<Quantity>(uniform(3));

    std::vector<ParagraphInput> paragraphs;
    if (chance(noise_.context_numerics)) {
      paragraphs.push_back({"BACKGROUND", capitalize(disease) + " affects more than " +
                                              std::to_string(20 + uniform(60)) +
                                              " million people worldwide and raises the risk of "
                                              "visual loss by " +
                                              percent() + "."});
    }
    paragraphs.push_back({"PURPOSE", "To compare the efficacy and safety of <A1>" + arm1 +
                                         "</A1> with <A2>" + arm2 + "</A2> in <P>" + patients +
                                         "</P> with " + disease + "."});

    std::string methods = std::to_string(20 + uniform(180)) + " <P>" + patients + "</P> with " +
                          disease + " were " +
                          (chance(noise_.lexical_variation) ? "randomized to receive"
                                                            : "randomly assigned to either") +
                          " <A1>" + arm1 + "</A1> or <A2>" + arm2 + "</A2>.";
    methods += surgical ? " All procedures were performed by a single surgeon."
                        : " Both treatments were instilled " +
                              std::string(chance(0.5) ? "once daily" : "twice daily") + " for " +
                              std::to_string(weeks) + " weeks.";
    if (chance(noise_.baseline_distractor)) {
      methods += " Baseline " + lower_first(primary.prefix) + " was " + value(quantity) +
                 " in the <A1>" + arm1 + "</A1> group and " + value(quantity) + " in the <A2>" +
                 arm2 + "</A2> group.";
    }
    paragraphs.push_back({chance(noise_.lexical_variation) ? "METHODS" : "METHOD", methods});

    std::vector<std::string> results;
    const int secondary = noise_.secondary_min +
                          static_cast<int>(uniform(static_cast<std::uint64_t>(
                              noise_.secondary_max - noise_.secondary_min + 1)));
    if (chance(noise_.results_preamble)) {
      results.push_back("A total of " + value(Quantity::Frac) + " " + patients +
                        " completed the study.");
    }
    if (chance(noise_.results_preamble)) {
      results.push_back("Mean age was " + std::to_string(50 + uniform(30)) + " years and " +
                        percent() + " were women.");
    }
    std::vector<std::string> after;
    for (int s = 0; s < secondary; ++s) {
      const Outcome o = pick(kSecondaryOutcomes);
      const Quantity q = chance(noise_.secondary_same_type)
                             ? quantity
                             : static_cast<Quantity>((static_cast<int>(quantity) + 1 +
                                                      static_cast<int>(uniform(2))) % 3);
      const std::string sentence = frame(o, "", "", value(q), value(q), arm1, arm2, weeks, false);
      after.push_back(sentence);
    }
    results.push_back(frame(primary, "<OC>", "</OC>", value(quantity), value(quantity), arm1, arm2,
                            weeks, true));
    if (chance(noise_.difference_sentence)) {
      after.push_back("The difference between groups was " + value(Quantity::Meas) + " (95% CI " +
                      decimal(0.5 + uniform(20) / 10.0, 1) + " to " +
                      decimal(2.5 + uniform(20) / 10.0, 1) + " mmHg).");
    }
    results.insert(results.end(), after.begin(), after.end());
    std::string results_text;
    for (const auto& s : results) results_text += (results_text.empty() ? "" : " ") + s;
    paragraphs.push_back({"RESULTS", results_text});

    std::string conclusion = capitalize(arm1) + " was more effective than " + arm2 +
                             " in lowering intraocular pressure";
    if (chance(noise_.context_numerics)) conclusion += " over " + std::to_string(weeks) + " weeks";
    paragraphs.push_back({"CONCLUSIONS", conclusion + "."});

    const std::string title = "Efficacy of " + arm1 + " compared with " + arm2 + " in " +
                              patients + " with " + disease + ": a randomized trial";
    std::ostringstream id;
    id << "synth-" << std::setw(4) << std::setfill('0') << index + 1;
    return parse_annotated(id.str(), title, paragraphs);
  }

 private:
  std::uint64_t uniform(std::uint64_t n) { return rng_() % n; }
  bool chance(double p) { return p > 0 && static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }

  template <std::size_t N>
  std::string_view pick(const std::array<std::string_view, N>& a) { return a[uniform(N)]; }
  template <std::size_t N>
  Outcome pick(const std::array<Outcome, N>& a) { return a[uniform(N)]; }
  template <std::size_t N>
  std::string varied(const std::array<std::string_view, N>& a) {
    return std::string(chance(noise_.lexical_variation) ? a[uniform(N)] : a[0]);
  }

  static std::string decimal(double v, int digits) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
  }
  std::string percent() { return decimal(5 + uniform(600) / 10.0, 1) + "%"; }

  std::string value(Quantity q) {
    switch (q) {
      case Quantity::Meas: {
        const double mean = (uniform(2) ? -1.0 : 1.0) * (0.5 + uniform(80) / 10.0);
        const double sd = 0.5 + uniform(30) / 10.0;
        return decimal(mean, 1) + " +/- " + decimal(sd, 1) + " mmHg";
      }
      case Quantity::Perc:
        return percent();
      case Quantity::Frac: {
        const auto total = 20 + uniform(80);
        return std::to_string(uniform(total + 1)) + " of " + std::to_string(total);
      }
    }
    return "";
  }

  // One results sentence. Tags wrap the outcome head and, for the primary
  // sentence, both values.
  std::string frame(const Outcome& o, std::string_view open, std::string_view close,
                    const std::string& v1, const std::string& v2, const std::string& arm1,
                    const std::string& arm2, int weeks, bool primary) {
    const auto tagged = [&](std::string_view label, const std::string& v) {
      if (!primary) return v;
      return "<" + std::string(label) + ">" + v + "</" + std::string(label) + ">";
    };
    const std::string outcome =
        std::string(o.prefix) + " " + std::string(open) + std::string(o.head) + std::string(close);
    const auto form = chance(noise_.lexical_variation) ? uniform(3) : 0;
    switch (form) {
      case 1:
        return outcome + " was " + tagged("R1", v1) + " in the " + arm1 + " group and " +
               tagged("R2", v2) + " in the " + arm2 + " group (P < 0.0" +
               std::to_string(1 + uniform(5)) + ").";
      case 2:
        return "At " + std::to_string(weeks) + " weeks, " + lower_first(outcome) + " was " +
               tagged("R1", v1) + " with " + arm1 + " versus " + tagged("R2", v2) + " with " +
               arm2 + ".";
      default:
        return outcome + " from baseline were " + tagged("R1", v1) + " in " + capitalize(arm1) +
               " administered patients and " + tagged("R2", v2) + " in " + capitalize(arm2) +
               " administered patients at " + std::to_string(weeks) + " weeks.";
    }
  }

  static std::string capitalize(std::string_view s) {
    std::string out(s);
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
  }
  static std::string lower_first(std::string_view s) {
    std::string out(s);
    if (out.size() > 1 && out[0] >= 'A' && out[0] <= 'Z' && !(out[1] >= 'A' && out[1] <= 'Z'))
      out[0] = static_cast<char>(out[0] - 'A' + 'a');
    return out;
  }

  std::mt19937_64 rng_;
  NoiseConfig noise_;
};

}  // namespace

std::vector<Abstract> generate_synthetic(std::size_t n, std::uint64_t seed, const NoiseConfig& noise) {
  Writer w(seed, noise);
  std::vector<Abstract> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(w.abstract(i));
  return out;
}

}  // namespace evtab
