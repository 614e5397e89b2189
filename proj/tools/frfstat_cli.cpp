// frfstat command-line interface.
//
// Exit codes: 0 success, 2 invalid input or arguments, 3 degenerate
// bootstrap statistics.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frfstat/frfstat.hpp"

namespace {

using namespace frfstat;

constexpr int kExitInvalid = 2;
constexpr int kExitDegenerate = 3;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Writes to a file, or to stdout when the path is empty or "-".
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw InvalidArgument("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

struct CommonOptions {
    std::string data;
    std::string format;  // empty = by extension
    std::size_t replications = 1000;
    std::size_t nested = 50;
    std::uint64_t seed = 1;
    std::size_t bins = 1000;
    std::string quantiles = "histogram";

    DataFormat data_format(const std::string& path) const {
        if (format.empty()) return format_from_path(path);
        return format == "json" ? DataFormat::json : DataFormat::csv;
    }

    BootstrapConfig config() const {
        BootstrapConfig cfg;
        cfg.replications = replications;
        cfg.nested_replications = nested;
        cfg.seed = seed;
        cfg.bins = bins;
        cfg.quantiles = quantiles == "exact" ? QuantileMode::exact : QuantileMode::histogram;
        if (const char* env = std::getenv("THREADS")) {
            char* end = nullptr;
            const unsigned long t = std::strtoul(env, &end, 10);
            if (end == env || *end != '\0') throw InvalidArgument("THREADS must be a non-negative integer");
            cfg.threads = static_cast<unsigned>(t);
        }
        cfg.validate();
        return cfg;
    }

    Dataset load() const { return load_dataset(data, data_format(data)); }
};

void add_data(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("data", o.data, "Dataset file (.csv or .json)")->required();
    cmd->add_option("--format", o.format, "Input format override")->check(CLI::IsMember({"csv", "json"}));
}

void add_bootstrap(CLI::App* cmd, CommonOptions& o, bool nested) {
    cmd->add_option("--B", o.replications, "Bootstrap replications")->check(CLI::PositiveNumber);
    if (nested) cmd->add_option("--Bs", o.nested, "Nested bootstrap replications");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--bins", o.bins, "Histogram bins for the statistic CDF");
    cmd->add_option("--quantiles", o.quantiles, "histogram or exact")
        ->check(CLI::IsMember({"histogram", "exact"}));
}

Frf load_test_sample(const std::string& path, const std::string& group, std::size_t sample,
                     const FrequencyGrid& grid, const CommonOptions& o) {
    const Dataset d = load_dataset(path, o.data_format(path));
    if (!d.grid.same_as(grid))
        throw DimensionMismatch("test file '" + path + "' uses a different frequency grid");
    const FrfSet& set = group.empty() ? d.groups.begin()->second : d.group(group);
    if (sample >= set.size())
        throw InvalidArgument("test sample index " + std::to_string(sample) + " out of range (group has " +
                              std::to_string(set.size()) + ")");
    return set[sample];
}

void write_band(std::ostream& out, const Band& band, const FrequencyGrid& grid,
                const std::vector<double>* extra = nullptr, const char* extra_name = nullptr) {
    out << "# t mean lower upper";
    if (extra) out << ' ' << extra_name;
    out << '\n';
    for (std::size_t n = 0; n < band.mean.size(); ++n) {
        out << num(grid.time(n)) << ' ' << num(band.mean[n]) << ' ' << num(band.lower[n]) << ' '
            << num(band.upper[n]);
        if (extra) out << ' ' << num((*extra)[n]);
        out << '\n';
    }
}

void write_ecdf(std::ostream& out, const StatEcdf& e) {
    out << "# value cdf\n";
    for (std::size_t k = 0; k < e.bins(); ++k) out << num(e.bin_edges[k + 1]) << ' ' << num(e.cdf[k]) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw InvalidArgument("'" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bootstrap statistics for frequency response functions"};
    app.require_subcommand(1);

    CommonOptions o;
    std::string group, group2, test_path, test_group, out_path, metric = "squared", numerator = "code";
    std::optional<std::size_t> sample;
    std::size_t test_sample = 0;
    double alpha = 0.95;

    auto* pir = app.add_subcommand("pir", "Pseudo-impulse responses of a group (t, value columns)");
    add_data(pir, o);
    pir->add_option("--group", group)->required();
    pir->add_option("--sample", sample, "Only this 0-based sample");
    pir->add_option("--out", out_path, "Output file (default stdout)");

    auto* band = app.add_subcommand("band", "Prediction band for a new draw");
    add_data(band, o);
    add_bootstrap(band, o, false);
    band->add_option("--group", group)->required();
    band->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
    band->add_option("--out", out_path, "Band columns: t mean lower upper");

    auto* minband = app.add_subcommand("minband", "Minimal prediction band containing a test FRF");
    add_data(minband, o);
    add_bootstrap(minband, o, false);
    minband->add_option("--group", group)->required();
    minband->add_option("--test", test_path, "File holding the test FRF")->required();
    minband->add_option("--test-group", test_group, "Group in the test file (default: first)");
    minband->add_option("--test-sample", test_sample, "0-based sample in the test group");
    minband->add_option("--out", out_path, "Prefix for <prefix>_band.txt and <prefix>_ecdf.txt");

    auto* density = app.add_subcommand("density", "Bootstrap CDF and PDF of a test FRF's distance");
    add_data(density, o);
    add_bootstrap(density, o, false);
    density->add_option("--group", group)->required();
    density->add_option("--test", test_path)->required();
    density->add_option("--test-group", test_group);
    density->add_option("--test-sample", test_sample);
    density->add_option("--metric", metric)->check(CLI::IsMember({"squared", "max"}));
    density->add_option("--numerator", numerator, "code (reference) or span")
        ->check(CLI::IsMember({"code", "span"}));

    auto* compare = app.add_subcommand("compare", "Unpaired comparison of two groups");
    add_data(compare, o);
    add_bootstrap(compare, o, true);
    compare->add_option("--group1", group)->required();
    compare->add_option("--group2", group2)->required();
    compare->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
    compare->add_option("--out", out_path, "Prefix for _band.txt, _residuals.txt, _residual_frf.txt");

    std::string freqs_text, mean_re_text, mean_im_text, shape = "lowpass", synth_group = "A";
    std::size_t synth_n = 20;
    double noise = 0.1, gain = 1.0;
    std::optional<double> rate;
    bool append = false;
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
    synth->add_option("--freqs", freqs_text, "Comma-separated frequencies in Hz")->required();
    synth->add_option("--n", synth_n)->check(CLI::PositiveNumber);
    synth->add_option("--noise", noise, "Std per real/imaginary component");
    synth->add_option("--gain", gain, "Multiplier of the mean FRF");
    synth->add_option("--seed", o.seed);
    synth->add_option("--sample-rate", rate);
    synth->add_option("--shape", shape, "Mean FRF when --mean-re is absent")
        ->check(CLI::IsMember({"lowpass", "unit"}));
    synth->add_option("--mean-re", mean_re_text, "Comma-separated real parts of the mean FRF");
    synth->add_option("--mean-im", mean_im_text, "Comma-separated imaginary parts of the mean FRF");
    synth->add_option("--group", synth_group);
    synth->add_flag("--append", append, "Add the group to an existing --out dataset");
    synth->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
    synth->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*pir) {
            const Dataset d = o.load();
            const FrfSet& set = d.group(group);
            const CurveMatrix y = pir_matrix(set, d.grid);
            if (sample && *sample >= set.size())
                throw InvalidArgument("sample index out of range (group has " + std::to_string(set.size()) + ")");
            Sink sink(out_path);
            auto& out = sink.stream();
            if (sample) {
                out << "# t value\n";
            } else {
                out << "# t";
                for (std::size_t i = 0; i < set.size(); ++i) out << " x" << i;
                out << '\n';
            }
            for (Eigen::Index n = 0; n < y.cols(); ++n) {
                out << num(d.grid.time(static_cast<std::size_t>(n)));
                if (sample) {
                    out << ' ' << num(y(static_cast<Eigen::Index>(*sample), n));
                } else {
                    for (Eigen::Index i = 0; i < y.rows(); ++i) out << ' ' << num(y(i, n));
                }
                out << '\n';
            }
        } else if (*band) {
            const Dataset d = o.load();
            const Band b = prediction_band(d.group(group), d.grid, alpha, o.config());
            std::cout << "C_p " << num(b.scale) << '\n';
            if (!out_path.empty()) {
                Sink sink(out_path);
                write_band(sink.stream(), b, d.grid);
            }
        } else if (*minband) {
            const Dataset d = o.load();
            const Frf test = load_test_sample(test_path, test_group, test_sample, d.grid, o);
            const MinimalBand r = minimal_prediction_band(test, d.group(group), d.grid, o.config());
            std::cout << "alpha " << num(r.alpha) << '\n' << "C_p " << num(r.band.scale) << '\n';
            if (!out_path.empty()) {
                const Pir xt = pir_from_frf(test, d.grid);
                Sink band_sink(out_path + "_band.txt");
                write_band(band_sink.stream(), r.band, d.grid, &xt.values, "test");
                Sink ecdf_sink(out_path + "_ecdf.txt");
                write_ecdf(ecdf_sink.stream(), r.ecdf);
            }
        } else if (*density) {
            const Dataset d = o.load();
            const Frf test = load_test_sample(test_path, test_group, test_sample, d.grid, o);
            const DistanceMetric m =
                metric == "max" ? DistanceMetric::max_absolute() : DistanceMetric::integrated_squared();
            const PdfNumerator mode =
                numerator == "span" ? PdfNumerator::index_span : PdfNumerator::code_compatible;
            const DensityEstimate e = estimate_density(test, d.group(group), d.grid, o.config(), m, mode);
            std::cout << "F " << num(e.cdf_mean) << '\n'
                      << "sigma_F " << num(e.cdf_std) << '\n'
                      << "f " << num(e.pdf_mean) << '\n'
                      << "sigma_f " << num(e.pdf_std) << '\n';
        } else if (*compare) {
            const Dataset d = o.load();
            const ComparisonResult r =
                compare_unpaired(d.group(group), d.group(group2), d.grid, alpha, o.config());
            std::cout << (r.reject_null ? "reject" : "accept") << '\n' << "C_u " << num(r.band.scale) << '\n';
            if (!out_path.empty()) {
                Sink band_sink(out_path + "_band.txt");
                write_band(band_sink.stream(), r.band, d.grid, &r.sigma, "sigma");
                Sink res_sink(out_path + "_residuals.txt");
                res_sink.stream() << "# t residual\n";
                for (std::size_t n = 0; n < r.residuals.size(); ++n)
                    res_sink.stream() << num(d.grid.time(n)) << ' ' << num(r.residuals[n]) << '\n';
                Sink frf_sink(out_path + "_residual_frf.txt");
                frf_sink.stream() << "# freq_hz re im magnitude\n";
                for (std::size_t k = 0; k < d.grid.size(); ++k) {
                    const Complex h = r.residual_frf[k];
                    frf_sink.stream() << num(d.grid.frequencies()[k]) << ' ' << num(h.real()) << ' '
                                      << num(h.imag()) << ' ' << num(std::abs(h)) << '\n';
                }
            }
        } else if (*synth) {
            const std::vector<double> freqs = parse_list(freqs_text);
            const FrequencyGrid grid = derive_grid(freqs, rate);
            Frf mean;
            if (!mean_re_text.empty()) {
                const auto re = parse_list(mean_re_text);
                auto im = mean_im_text.empty() ? std::vector<double>(re.size(), 0.0) : parse_list(mean_im_text);
                if (re.size() != freqs.size() || im.size() != freqs.size())
                    throw InvalidArgument("--mean-re/--mean-im need one value per frequency");
                std::vector<Complex> h(freqs.size());
                for (std::size_t k = 0; k < h.size(); ++k) h[k] = Complex(re[k], im[k]);
                mean = Frf(std::move(h));
            } else if (shape == "unit") {
                mean = Frf(std::vector<Complex>(freqs.size(), Complex(1.0, 0.0)));
            } else {
                mean = lowpass_response(freqs);
            }
            const FrfSet set = generate_synthetic(SyntheticSpec{mean, noise, synth_n, gain}, o.seed);
            const DataFormat fmt = o.data_format(out_path);
            if (append && std::filesystem::exists(out_path)) {
                Dataset d = load_dataset(out_path, fmt);
                if (!d.grid.same_as(grid)) throw DimensionMismatch("--append target uses a different grid");
                d.groups.insert_or_assign(synth_group, set);
                save_dataset(d, out_path, fmt);
            } else {
                Dataset d{grid, {{synth_group, set}}, {}};
                save_dataset(d, out_path, fmt);
            }
        }
    } catch (const DegenerateStatistics& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return 0;
}
