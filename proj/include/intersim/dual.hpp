#pragma once
// Forward-mode dual numbers with a fixed number of tangent directions. Used to
// get exact partial derivatives of small closed-form geometric expressions.

#include <array>
#include <cmath>

namespace intersim
{
    template <int N> struct Dual
    {
        double val = 0.0;
        std::array<double, N> d{};

        Dual () = default;
        Dual (double v) : val (v) {} // NOLINT(google-explicit-constructor)

        static Dual variable (double v, int slot)
        {
            Dual x (v);
            x.d[slot] = 1.0;
            return x;
        }

        Dual &operator+= (const Dual &o)
        {
            val += o.val;
            for (int k = 0; k < N; ++k)
                d[k] += o.d[k];
            return *this;
        }
        Dual &operator-= (const Dual &o)
        {
            val -= o.val;
            for (int k = 0; k < N; ++k)
                d[k] -= o.d[k];
            return *this;
        }
        Dual &operator*= (const Dual &o)
        {
            for (int k = 0; k < N; ++k)
                d[k] = d[k] * o.val + val * o.d[k];
            val *= o.val;
            return *this;
        }
        Dual &operator/= (const Dual &o)
        {
            const double inv = 1.0 / o.val;
            for (int k = 0; k < N; ++k)
                d[k] = (d[k] - val * inv * o.d[k]) * inv;
            val *= inv;
            return *this;
        }

        friend Dual operator+ (Dual a, const Dual &b) { return a += b; }
        friend Dual operator- (Dual a, const Dual &b) { return a -= b; }
        friend Dual operator* (Dual a, const Dual &b) { return a *= b; }
        friend Dual operator/ (Dual a, const Dual &b) { return a /= b; }
        friend Dual operator- (Dual a)
        {
            a.val = -a.val;
            for (auto &x : a.d)
                x = -x;
            return a;
        }
    };

    namespace detail
    {
        // f(a) with f'(a.val) = slope
        template <int N> Dual<N> chain (const Dual<N> &a, double value, double slope)
        {
            Dual<N> out (value);
            for (int k = 0; k < N; ++k)
                out.d[k] = slope * a.d[k];
            return out;
        }
    } // namespace detail

    inline double value_of (double x) { return x; }
    template <int N> double value_of (const Dual<N> &x) { return x.val; }

    template <int N> Dual<N> sqrt (const Dual<N> &a)
    {
        const double r = std::sqrt (a.val);
        return detail::chain (a, r, 0.5 / r);
    }
    template <int N> Dual<N> exp (const Dual<N> &a)
    {
        const double e = std::exp (a.val);
        return detail::chain (a, e, e);
    }
    template <int N> Dual<N> log1p (const Dual<N> &a) { return detail::chain (a, std::log1p (a.val), 1.0 / (1.0 + a.val)); }
    template <int N> Dual<N> sin (const Dual<N> &a) { return detail::chain (a, std::sin (a.val), std::cos (a.val)); }
    template <int N> Dual<N> cos (const Dual<N> &a) { return detail::chain (a, std::cos (a.val), -std::sin (a.val)); }

    using std::cos;
    using std::exp;
    using std::log1p;
    using std::sin;
    using std::sqrt;

} // namespace intersim
