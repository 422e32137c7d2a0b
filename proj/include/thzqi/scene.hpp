#pragma once

#include <functional>
#include <string>

namespace thzqi::scene {

/// Round-trip response of the sample at one point: return-efficiency
/// magnitude in [0,1] and round-trip phase in radians.
struct Response {
    double magnitude = 1.0;
    double phase = 0.0;
};

/// A reflective sample described in sample-plane coordinates (meters) with a
/// frequency argument in hertz. Responses are pure functions and safe to
/// evaluate concurrently.
struct SceneObject {
    std::function<Response(double x, double y, double frequency)> response;
    std::string label;
};

struct TapeSpec {
    double refractive_index = 1.5;
    double thickness = 50e-6;
    double stripe_width = 0.5e-3;
};

/// Bare metal plate: unit return, zero phase everywhere.
SceneObject plain_mirror();

/// Two full-plane diagonal bars (+-45 degrees through the origin) of the
/// given width cut out of a metal plate. Inside the bars nothing returns.
SceneObject cross_cutout(double line_width);

/// Metal plate with vertical adhesive-tape stripes: bare on the left, one
/// layer in a center stripe of spec.stripe_width, two layers on the right.
/// Pure phase object; each layer adds 2 * 2*pi*f*(n-1)*d / c round trip.
SceneObject tape_stripes(const TapeSpec& spec = {});

/// Two absorber halves in front of the mirror: extinction K_left for x < 0,
/// K_right for x >= 0; round-trip magnitude 10^(-K/2), zero phase.
SceneObject half_absorber(double extinction_left, double extinction_right);

/// Opaque edge: unit return for x < edge_x, nothing for x >= edge_x.
SceneObject knife_edge(double edge_x);

/// Load a custom scene from a two-channel CSV raster. Format:
///   # pitch <meters> rows <r> cols <c>
///   <r lines of c comma-separated magnitudes>
///   <r lines of c comma-separated phases>
/// The raster is centered on the origin; nearest-neighbor lookup, bare
/// mirror outside the raster extent.
SceneObject from_csv_raster(const std::string& path);

}  // namespace thzqi::scene
