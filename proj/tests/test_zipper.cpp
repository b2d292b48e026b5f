#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "loewner/fixtures.hpp"
#include "loewner/zipper.hpp"

using namespace loewner;
using zipper::map_disk_minus_slits;

namespace {

double radial_lmr(double x) { return std::log((1 + x) * (1 + x) / (4 * x)); }

zipper::MappingResult map(const std::vector<Slit>& slits, int resolution) {
    return map_disk_minus_slits(slits, resolution);
}

}  // namespace

TEST(Map, EmptyPrefixesGiveIdentity) {
    const auto r = map({Slit{{1.0}}, Slit{{-1.0}}}, 100);
    EXPECT_EQ(r.lmr_value, 0.0);
    EXPECT_EQ(r.evaluate(cplx(0.3, -0.2)), cplx(0.3, -0.2));
    EXPECT_FALSE(r.tip_images[0].has_value());
}

TEST(Map, RadialSlitClosedForm) {
    const double x = 3 - 2 * std::sqrt(2.0);
    for (int R : {500, 2000}) EXPECT_NEAR(map({Slit{{1.0, x}}}, R).lmr_value, std::log(2.0), 1e-9) << R;
    for (double y : {0.2, 0.5, 0.9}) EXPECT_NEAR(map({Slit{{1.0, y}}}, 1000).lmr_value, radial_lmr(y), 1e-9) << y;
}

TEST(Map, RotationInvariance) {
    const cplx b = std::polar(1.0, 2.1);
    EXPECT_NEAR(map({Slit{{b, 0.4 * b}}}, 800).lmr_value, radial_lmr(0.4), 1e-9);
}

TEST(Map, SymmetricPairClosedForm) {
    // z^2 maps the pair onto a single slit to x^2
    const double x = 0.5;
    const double expected = 0.5 * std::log((1 + x * x) * (1 + x * x) / (4 * x * x));
    EXPECT_NEAR(map({Slit{{1.0, x}}, Slit{{-1.0, -x}}}, 2000).lmr_value, expected, 1e-9);
}

TEST(Map, TipImagesAreUnimodular) {
    const auto r = map(fixtures::curved_pair().slits, 1000);
    for (const auto& t : r.tip_images) {
        ASSERT_TRUE(t.has_value());
        EXPECT_NEAR(std::abs(*t), 1.0, 1e-14);
    }
    // a radial slit on the positive axis keeps its tip image at 1
    const auto s = map({Slit{{1.0, 0.3}}}, 500);
    EXPECT_NEAR(std::abs(*s.tip_images[0] - 1.0), 0.0, 1e-12);
}

TEST(Map, Normalization) {
    const auto r = map(fixtures::asymmetric_pair().slits, 1000);
    EXPECT_LT(std::abs(r.evaluate(0.0)), 1e-12);
    for (int i = 0; i < 50; ++i) {
        const cplx z = std::polar(0.95 * std::sqrt((i + 0.5) / 50.0), 2.4 * i);
        EXPECT_LT(std::abs(r.evaluate(z)), 1.0);
    }
    // finite-difference derivative at 0: real, positive, and equal to exp(lmr)
    const double h = 1e-5;
    const cplx d = (r.evaluate(h) - r.evaluate(-h)) / (2 * h);
    EXPECT_LT(std::abs(d.imag()) / std::abs(d), 1e-8);
    EXPECT_NEAR(d.real() / std::exp(r.lmr_value), 1.0, 1e-8);
}

TEST(Map, MonotoneInPrefix) {
    const auto slit = fixtures::curved_pair().slits[0];
    double prev = 0.0;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        const double v = map({geometry::prefix_points(slit, f)}, 1000).lmr_value;
        EXPECT_GT(v, prev) << f;
        prev = v;
    }
}

TEST(Map, ConvergesUnderRefinement) {
    const auto slits = fixtures::curved_pair().slits;
    std::vector<double> v;
    for (int R : {250, 500, 1000, 2000}) v.push_back(map(slits, R).lmr_value);
    for (size_t i = 2; i < v.size(); ++i) EXPECT_LT(std::abs(v[i] - v[i - 1]), std::abs(v[i - 1] - v[i - 2]));
}

TEST(Map, AccuracyWarning) {
    const auto arc = fixtures::polyline_arc(0.0, 1.0, 0.5, 40);
    EXPECT_TRUE(map({arc}, 20).accuracy_warning);
    EXPECT_FALSE(map({arc}, 100).accuracy_warning);
}

TEST(Map, NearlyTouchingSlitsConflict) {
    const std::vector<Slit> slits{Slit{{1.0, 0.5}}, Slit{{I, cplx(0.5, 1e-11)}}};
    EXPECT_THROW(map(slits, 500), GeometricConflict);
}

TEST(Session, ProbeMatchesAdvanceBitwise) {
    const auto sys = fixtures::asymmetric_pair();
    std::vector<zipper::GriddedSlit> grids;
    for (const auto& s : sys.slits) grids.emplace_back(geometry::subdivide(s.points, 0.01), geometry::length(s));
    zipper::UnzipSession base(grids);
    base.advance(0, 0.37);
    zipper::SlitProbe probe(base, 1);
    for (double f : {0.05, 0.5, 0.731, 1.0}) {
        zipper::UnzipSession s = base;
        s.advance(1, f);
        const auto v = probe.evaluate(f);
        EXPECT_EQ(v.lmr, s.lmr()) << f;
        EXPECT_EQ(v.tip, s.tip_image(1)) << f;
    }
    EXPECT_THROW(base.advance(0, 0.1), std::invalid_argument);
    EXPECT_THROW(base.advance(0, 2.0), BracketFailure);
}

TEST(Kernel, Examples) {
    EXPECT_EQ(zipper::kernel(1.0, 0.0), cplx(1.0, 0.0));
    EXPECT_NEAR(std::abs(zipper::kernel(1.0, -1.0 + 1e-12)), 0.0, 1e-11);
    const cplx v = zipper::kernel(I, 0.5);
    const cplx expected = (I + 0.5) / (I - 0.5);
    EXPECT_NEAR(std::abs(v - expected), 0.0, 1e-15);
    EXPECT_NEAR(v.real(), 0.6, 1e-15);
    EXPECT_NEAR(v.imag(), -0.8, 1e-15);
}

TEST(Kernel, HerglotzAndNormalization) {
    for (int i = 0; i < 40; ++i) {
        const cplx u = std::polar(1.0, 0.7 * i);
        EXPECT_NEAR(std::abs(zipper::kernel(u, 0.0) - 1.0), 0.0, 1e-15);
        for (int j = 0; j < 40; ++j) EXPECT_GT(zipper::kernel(u, std::polar(0.999 * j / 40.0, 1.3 * j)).real(), 0.0);
    }
}

TEST(Kernel, Errors) {
    EXPECT_THROW(zipper::kernel(1.0, 0.0, zipper::KernelSpec{1}), UnsupportedConnectivity);
    EXPECT_THROW(zipper::kernel(1.0, 1.0), std::domain_error);
    EXPECT_THROW(zipper::kernel(0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(zipper::kernel(1.0, 1.5), std::invalid_argument);
}

TEST(StepsCsv, HeaderAndRows) {
    const auto r = map({Slit{{1.0, 0.5}}}, 10);
    std::ostringstream os;
    zipper::write_steps_csv(os, r.steps);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "step,slit,zeta_re,zeta_im,cinv,d,w0_re,w0_im,rot_re,rot_im,running_lmr");
    EXPECT_EQ(static_cast<size_t>(std::count(s.begin(), s.end(), '\n')), r.steps.size() + 1);
}
