#include "mixmap/blend.hpp"

#include "mixmap/smoothstep.hpp"

namespace mixmap {

namespace {

// Endpoint range of a poly on [0,w], with an interior sampling guard.
// All derivative polys fed to blends are monotone on their fade, so the
// range is the endpoint hull; the guard catches misuse.
std::pair<Rational, Rational> fade_range(const Poly& P, const Rational& w) {
    Rational e0 = P.eval(0), e1 = P.eval(w);
    Rational lo = e0 < e1 ? e0 : e1;
    Rational hi = e0 < e1 ? e1 : e0;
    for (int i = 1; i < 8; ++i) {
        Rational v = P.eval(w * Rational(i, 8));
        if (v < lo || v > hi)
            throw std::logic_error("blend: derivative poly not monotone on fade");
    }
    return {lo, hi};
}

} // namespace

BlendResult build_blend(const BlendSpec& spec) {
    if (!(spec.a < spec.b)) throw std::invalid_argument("blend: empty domain");
    if (!(spec.lo <= spec.hi)) throw std::invalid_argument("blend: bad corridor");
    Poly S = smoothstep_poly(spec.p);
    Rational len = spec.b - spec.a;
    Rational w = spec.w_start;
    if (w > len / 2) w = len / 2;
    if (w <= 0) throw std::invalid_argument("blend: bad w_start");

    // Fade polys in local xi, A evaluated in host coordinate.
    Poly Al = spec.A_a.compose_affine(1, spec.a);       // A_a(a + xi)
    for (int halvings = 0; halvings <= spec.max_halvings; ++halvings, w /= 2) {
        Poly Ar = spec.A_b.compose_affine(1, spec.b - w); // A_b(b - w + xi)
        Rational inv_w = Rational(1) / w;
        Poly S_up = S.compose_affine(inv_w, 0);           // S(xi/w)
        Poly S_dn = S.compose_affine(-inv_w, 1);          // S((w-xi)/w)

        Rational Ea = (Al * S_dn).integrate(0, w);
        Rational Eb = (Ar * S_up).integrate(0, w);
        Rational gamma = (spec.delta_val - Ea - Eb) / (len - w);

        auto ra = fade_range(Al, w);
        auto rb = fade_range(Ar, w);
        bool ok = spec.lo <= gamma && gamma <= spec.hi &&
                  spec.lo <= ra.first && ra.second <= spec.hi &&
                  spec.lo <= rb.first && rb.second <= spec.hi;
        if (!ok) continue;

        Poly dleft = Al * S_dn + S_up * gamma;
        Poly dright = S_dn * gamma + Ar * S_up;
        BlendResult res;
        res.w = w;
        res.gamma = gamma;
        res.left = dleft.antiderivative();
        Rational v_aw = res.left.eval(w);
        res.mid = Poly::linear(v_aw, gamma);
        Rational v_bw = v_aw + gamma * (len - 2 * w);
        res.right = dright.antiderivative() + Poly::constant(v_bw);
        if (res.right.eval(w) != spec.delta_val)
            throw std::logic_error("blend: increment identity failed");
        return res;
    }
    throw std::runtime_error("blend: no fade width certifies the corridor");
}

} // namespace mixmap
