#include "thzqi/optics.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace thzqi::optics {

double theoretical_fov(const OpticalConfig& cfg)
{
    return std::sqrt(2.0 * std::log(2.0)) * cfg.pump_waist / cfg.mag_thz;
}

double diffraction_resolution(double lambda_thz, double na)
{
    if (!(na > 0.0 && na <= 1.0))
        throw InvalidNA{};
    return 0.51 * lambda_thz / na;
}

double delay_time_step(double step_length)
{
    if (step_length < 0.0)
        throw std::invalid_argument("delay_time_step: negative step length");
    return 2.0 * step_length / kSpeedOfLight;
}

std::vector<Violation> validate(const ConfigBundle& b)
{
    std::vector<Violation> v;
    auto need = [&](bool ok, const char* field, const char* constraint) {
        if (!ok)
            v.push_back({field, constraint});
    };

    need(b.optics.lambda_vis > 0.0, "lambda_vis", "must be > 0");
    need(b.optics.lambda_thz > 0.0, "lambda_thz", "must be > 0");
    need(b.optics.lambda_thz > b.optics.lambda_vis, "lambda_thz",
         "must exceed lambda_vis");
    need(b.optics.crystal_length > 0.0, "crystal_length", "must be > 0");
    need(b.optics.pump_waist > 0.0, "pump_waist", "must be > 0");
    need(b.optics.mag_thz > 0.0, "mag_thz", "must be > 0");
    need(b.optics.mag_vis > 0.0, "mag_vis", "must be > 0");
    need(b.optics.mag_image > 0.0, "mag_image", "must be > 0");
    need(b.optics.na_limit > 0.0 && b.optics.na_limit <= 1.0, "na_limit",
         "must be in (0, 1]");

    need(b.scan.step_length > 0.0, "step_length", "must be > 0");
    need(b.scan.n_steps >= 8, "n_steps", "must be >= 8");
    need(b.scan.frames_averaged_per_step >= 1, "frames_averaged_per_step",
         "must be >= 1");
    need(b.scan.exposure > 0.0, "exposure", "must be > 0");
    if (b.scan.step_length > 0.0) {
        // Nyquist of the delay axis must clear the top of the analysis band.
        const double nyquist = kSpeedOfLight / (4.0 * b.scan.step_length);
        const double band_edge =
            b.spectral.center_frequency + b.spectral.fwhm;
        need(nyquist > band_edge, "step_length",
             "delay sampling too coarse: Nyquist below the analysis band");
    }

    need(b.spectral.center_frequency > b.spectral.fwhm, "center_frequency",
         "center minus fwhm must stay positive");
    need(b.spectral.fwhm > 0.0, "fwhm", "must be > 0");
    need(b.spectral.n_frequency_samples >= 1 &&
             b.spectral.n_frequency_samples % 2 == 1,
         "n_frequency_samples", "must be odd and >= 1");

    need(b.camera.pixel_pitch > 0.0, "pixel_pitch", "must be > 0");
    need(b.camera.binning >= 1, "binning", "must be >= 1");
    need(b.camera.quantum_efficiency > 0.0 &&
             b.camera.quantum_efficiency <= 1.0,
         "quantum_efficiency", "must be in (0, 1]");
    need(b.camera.background_rate >= 0.0, "background_rate", "must be >= 0");
    need(b.camera.sensor_rows >= 1 && b.camera.sensor_cols >= 1,
         "sensor_shape", "both dimensions must be >= 1");
    return v;
}

void require_valid(const ConfigBundle& bundle)
{
    const auto violations = validate(bundle);
    if (!violations.empty())
        throw std::invalid_argument("invalid config: " + violations[0].field +
                                    " " + violations[0].constraint);
}

std::vector<double> delay_axis(const ScanConfig& scan)
{
    const double dt = delay_time_step(scan.step_length);
    std::vector<double> t(scan.n_steps);
    const double mid = 0.5 * static_cast<double>(scan.n_steps - 1);
    for (int i = 0; i < scan.n_steps; ++i)
        t[i] = (static_cast<double>(i) - mid) * dt;
    return t;
}

namespace {

using nlohmann::json;

void check_known_fields(const json& j, const char* section,
                        std::initializer_list<const char*> known)
{
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k)
                ok = true;
        if (!ok)
            throw std::invalid_argument(std::string(section) +
                                        ": unknown field '" + item.key() + "'");
    }
}

}  // namespace

ConfigBundle bundle_from_json(const std::string& text)
{
    const json j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    ConfigBundle b;

    if (j.contains("optics")) {
        const auto& o = j.at("optics");
        check_known_fields(o, "optics",
                           {"lambda_vis", "lambda_thz", "crystal_length",
                            "pump_waist", "mag_thz", "mag_vis", "mag_image",
                            "na_limit"});
        b.optics.lambda_vis = o.value("lambda_vis", b.optics.lambda_vis);
        b.optics.lambda_thz = o.value("lambda_thz", b.optics.lambda_thz);
        b.optics.crystal_length =
            o.value("crystal_length", b.optics.crystal_length);
        b.optics.pump_waist = o.value("pump_waist", b.optics.pump_waist);
        b.optics.mag_thz = o.value("mag_thz", b.optics.mag_thz);
        b.optics.mag_vis = o.value("mag_vis", b.optics.mag_vis);
        b.optics.mag_image = o.value("mag_image", b.optics.mag_image);
        b.optics.na_limit = o.value("na_limit", b.optics.na_limit);
    }
    if (j.contains("scan")) {
        const auto& s = j.at("scan");
        check_known_fields(s, "scan",
                           {"step_length", "n_steps",
                            "frames_averaged_per_step", "exposure"});
        b.scan.step_length = s.value("step_length", b.scan.step_length);
        b.scan.n_steps = s.value("n_steps", b.scan.n_steps);
        b.scan.frames_averaged_per_step = s.value(
            "frames_averaged_per_step", b.scan.frames_averaged_per_step);
        b.scan.exposure = s.value("exposure", b.scan.exposure);
    }
    if (j.contains("spectral")) {
        const auto& s = j.at("spectral");
        check_known_fields(s, "spectral",
                           {"center_frequency", "fwhm", "n_frequency_samples",
                            "shape"});
        b.spectral.center_frequency =
            s.value("center_frequency", b.spectral.center_frequency);
        b.spectral.fwhm = s.value("fwhm", b.spectral.fwhm);
        b.spectral.n_frequency_samples =
            s.value("n_frequency_samples", b.spectral.n_frequency_samples);
        const std::string shape = s.value("shape", std::string("gaussian"));
        if (shape == "gaussian")
            b.spectral.shape = SpectralShape::gaussian;
        else if (shape == "sinc_squared")
            b.spectral.shape = SpectralShape::sinc_squared;
        else
            throw std::invalid_argument(
                "spectral.shape: expected 'gaussian' or 'sinc_squared'");
    }
    if (j.contains("camera")) {
        const auto& c = j.at("camera");
        check_known_fields(c, "camera",
                           {"pixel_pitch", "binning", "quantum_efficiency",
                            "background_rate", "sensor_shape"});
        b.camera.pixel_pitch = c.value("pixel_pitch", b.camera.pixel_pitch);
        b.camera.binning = c.value("binning", b.camera.binning);
        b.camera.quantum_efficiency =
            c.value("quantum_efficiency", b.camera.quantum_efficiency);
        b.camera.background_rate =
            c.value("background_rate", b.camera.background_rate);
        if (c.contains("sensor_shape")) {
            const auto& s = c.at("sensor_shape");
            if (!s.is_array() || s.size() != 2)
                throw std::invalid_argument(
                    "camera.sensor_shape: expected [rows, cols]");
            b.camera.sensor_rows = s[0].get<int>();
            b.camera.sensor_cols = s[1].get<int>();
        }
    }
    return b;
}

std::string bundle_to_json(const ConfigBundle& b)
{
    json j;
    j["optics"] = {{"lambda_vis", b.optics.lambda_vis},
                   {"lambda_thz", b.optics.lambda_thz},
                   {"crystal_length", b.optics.crystal_length},
                   {"pump_waist", b.optics.pump_waist},
                   {"mag_thz", b.optics.mag_thz},
                   {"mag_vis", b.optics.mag_vis},
                   {"mag_image", b.optics.mag_image},
                   {"na_limit", b.optics.na_limit}};
    j["scan"] = {{"step_length", b.scan.step_length},
                 {"n_steps", b.scan.n_steps},
                 {"frames_averaged_per_step", b.scan.frames_averaged_per_step},
                 {"exposure", b.scan.exposure}};
    j["spectral"] = {
        {"center_frequency", b.spectral.center_frequency},
        {"fwhm", b.spectral.fwhm},
        {"n_frequency_samples", b.spectral.n_frequency_samples},
        {"shape", b.spectral.shape == SpectralShape::gaussian
                      ? "gaussian"
                      : "sinc_squared"}};
    j["camera"] = {{"pixel_pitch", b.camera.pixel_pitch},
                   {"binning", b.camera.binning},
                   {"quantum_efficiency", b.camera.quantum_efficiency},
                   {"background_rate", b.camera.background_rate},
                   {"sensor_shape",
                    json::array({b.camera.sensor_rows, b.camera.sensor_cols})}};
    return j.dump(2);
}

}  // namespace thzqi::optics
