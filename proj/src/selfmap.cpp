#include "diskgeo/selfmap.hpp"

#include "diskgeo/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace diskgeo {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt(Complex c) {
    if (c.imag() == 0.0) return fmt(c.real());
    std::ostringstream os;
    os.precision(17);
    os << c.real() << (c.imag() >= 0 ? "+" : "") << c.imag() << "i";
    return os.str();
}

Complex ipow(Complex z, int n) {
    Complex result(1.0, 0.0);
    Complex base = z;
    while (n > 0) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

}  // namespace

SelfMapExpr SelfMapExpr::moebius(Complex a) {
    if (!(std::abs(a) < 1.0)) throw Error(ErrorCode::InvalidArgument, "moebius parameter needs |a| < 1");
    return SelfMapExpr(node::Moebius{a});
}

SelfMapExpr SelfMapExpr::monomial(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "monomial degree must be >= 1");
    return SelfMapExpr(node::Monomial{n});
}

SelfMapExpr SelfMapExpr::boundary_perturb(double c, int k) {
    if (!(c > 0.0) || k < 2)
        throw Error(ErrorCode::InvalidArgument, "boundary perturbation needs c > 0 and k >= 2");
    return SelfMapExpr(node::BoundaryPerturb{c, k});
}

SelfMapExpr SelfMapExpr::convex(double t, const SelfMapExpr& left, const SelfMapExpr& right) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "convex weight must lie in [0, 1]");
    return SelfMapExpr(node::Convex{t, std::make_shared<const SelfMapExpr>(left),
                                    std::make_shared<const SelfMapExpr>(right)});
}

SelfMapExpr SelfMapExpr::compose(const SelfMapExpr& outer, const SelfMapExpr& inner) {
    return SelfMapExpr(node::Compose{std::make_shared<const SelfMapExpr>(outer),
                                     std::make_shared<const SelfMapExpr>(inner)});
}

Complex SelfMapExpr::eval(Complex z) const {
    return std::visit(
        Overloaded{
            [z](const node::Identity&) { return z; },
            [z](const node::Scale& n) { return n.c * z; },
            [z](const node::Affine& n) { return n.a * z + n.b; },
            [z](const node::Moebius& n) { return (n.a + z) / (1.0 + std::conj(n.a) * z); },
            [z](const node::Monomial& n) { return ipow(z, n.n); },
            [z](const node::BoundaryPerturb& n) { return z + n.c * ipow(1.0 - z, n.k); },
            [z](const node::Convex& n) { return (1.0 - n.t) * n.left->eval(z) + n.t * n.right->eval(z); },
            [z](const node::Compose& n) { return n.outer->eval(n.inner->eval(z)); },
        },
        node_);
}

Complex SelfMapExpr::deriv(Complex z) const {
    return std::visit(
        Overloaded{
            [](const node::Identity&) { return Complex(1.0, 0.0); },
            [](const node::Scale& n) { return n.c; },
            [](const node::Affine& n) { return n.a; },
            [z](const node::Moebius& n) {
                const Complex den = 1.0 + std::conj(n.a) * z;
                return (1.0 - std::norm(n.a)) / (den * den);
            },
            [z](const node::Monomial& n) { return static_cast<double>(n.n) * ipow(z, n.n - 1); },
            [z](const node::BoundaryPerturb& n) {
                return 1.0 - n.c * static_cast<double>(n.k) * ipow(1.0 - z, n.k - 1);
            },
            [z](const node::Convex& n) {
                return (1.0 - n.t) * n.left->deriv(z) + n.t * n.right->deriv(z);
            },
            [z](const node::Compose& n) { return n.outer->deriv(n.inner->eval(z)) * n.inner->deriv(z); },
        },
        node_);
}

bool SelfMapExpr::analytically_selfmap() const {
    return std::visit(Overloaded{
                          [](const node::Identity&) { return true; },
                          [](const node::Scale& n) { return std::abs(n.c) <= 1.0; },
                          [](const node::Affine&) { return false; },
                          [](const node::Moebius&) { return true; },
                          [](const node::Monomial&) { return true; },
                          [](const node::BoundaryPerturb&) { return false; },
                          [](const node::Convex& n) {
                              return n.left->analytically_selfmap() && n.right->analytically_selfmap();
                          },
                          [](const node::Compose& n) {
                              return n.outer->analytically_selfmap() && n.inner->analytically_selfmap();
                          },
                      },
                      node_);
}

std::string SelfMapExpr::to_string() const {
    return std::visit(
        Overloaded{
            [](const node::Identity&) { return std::string("id"); },
            [](const node::Scale& n) { return "scale:" + fmt(n.c); },
            [](const node::Affine& n) { return "affine:" + fmt(n.a) + "," + fmt(n.b); },
            [](const node::Moebius& n) { return "moebius:" + fmt(n.a); },
            [](const node::Monomial& n) { return "mono:" + std::to_string(n.n); },
            [](const node::BoundaryPerturb& n) {
                return "perturb:c=" + fmt(n.c) + ",k=" + std::to_string(n.k);
            },
            [](const node::Convex& n) {
                return "convex:t=" + fmt(n.t) + "(" + n.left->to_string() + ")(" + n.right->to_string() + ")";
            },
            [](const node::Compose& n) {
                return "comp:(" + n.outer->to_string() + ")(" + n.inner->to_string() + ")";
            },
        },
        node_);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

double parse_real(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
    }
}

Complex parse_complex(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty complex literal");
    if (s.back() != 'i') return {parse_real(s), 0.0};
    s.pop_back();
    // split real and imaginary parts at the last sign that is not an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real(t);
    };
    if (split == std::string::npos) return {0.0, imag_of(s)};
    return {parse_real(s.substr(0, split)), imag_of(s.substr(split))};
}

// Splits "(<a>)(<b>)" into its two balanced groups.
std::pair<std::string, std::string> two_groups(const std::string& s) {
    std::vector<std::string> groups;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '(') throw Error(ErrorCode::ParseError, "expected '(' in '" + s + "'");
        int depth = 0;
        std::size_t j = i;
        for (; j < s.size(); ++j) {
            if (s[j] == '(') ++depth;
            if (s[j] == ')' && --depth == 0) break;
        }
        if (j == s.size()) throw Error(ErrorCode::ParseError, "unbalanced parentheses in '" + s + "'");
        groups.push_back(s.substr(i + 1, j - i - 1));
        i = j + 1;
    }
    if (groups.size() != 2) throw Error(ErrorCode::ParseError, "expected two map groups in '" + s + "'");
    return {groups[0], groups[1]};
}

}  // namespace

SelfMapExpr parse_map(const std::string& text) {
    if (text == "id") return SelfMapExpr::identity();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "unknown map '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (kind == "scale") return SelfMapExpr::scale(parse_complex(body));
    if (kind == "affine") {
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "affine expects a,b");
        return SelfMapExpr::affine(parse_complex(body.substr(0, comma)), parse_complex(body.substr(comma + 1)));
    }
    if (kind == "moebius") return SelfMapExpr::moebius(parse_complex(body));
    if (kind == "mono") return SelfMapExpr::monomial(static_cast<int>(parse_real(body)));
    if (kind == "perturb") {
        double c = 0.0;
        int k = 0;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.rfind("c=", 0) == 0)
                c = parse_real(item.substr(2));
            else if (item.rfind("k=", 0) == 0)
                k = static_cast<int>(parse_real(item.substr(2)));
            else
                throw Error(ErrorCode::ParseError, "perturb expects c=..,k=..");
        }
        return SelfMapExpr::boundary_perturb(c, k);
    }
    if (kind == "convex") {
        if (body.rfind("t=", 0) != 0) throw Error(ErrorCode::ParseError, "convex expects t=<value>(..)(..)");
        const auto paren = body.find('(');
        if (paren == std::string::npos) throw Error(ErrorCode::ParseError, "convex expects two groups");
        const double t = parse_real(body.substr(2, paren - 2));
        auto [a, b] = two_groups(body.substr(paren));
        return SelfMapExpr::convex(t, parse_map(a), parse_map(b));
    }
    if (kind == "comp") {
        auto [a, b] = two_groups(body);
        return SelfMapExpr::compose(parse_map(a), parse_map(b));
    }
    throw Error(ErrorCode::ParseError, "unknown map kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

SelfMapCheck check_selfmap(const SelfMapExpr& map, std::size_t n_samples, std::uint64_t seed,
                           double r_max) {
    SelfMapCheck out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n_circle = std::max<std::size_t>(1, n_samples / 10);
    double worst = -1.0;
    Point worst_z{};
    auto visit = [&](Point z) {
        const double m = std::abs(map.eval(z));
        if (!(m <= worst) || std::isnan(m)) {
            if (std::isnan(m) || m > worst) {
                worst = std::isnan(m) ? INFINITY : m;
                worst_z = z;
            }
        }
    };
    for (std::size_t i = 0; i < n_circle; ++i)
        visit(std::polar(r_max, kTwoPi * static_cast<double>(i) / n_circle));
    for (std::size_t i = n_circle; i < n_samples; ++i) {
        const double r = r_max * std::sqrt(unit(rng));
        visit(std::polar(r, kTwoPi * unit(rng)));
    }
    out.sup_modulus = worst;
    out.is_selfmap = worst < 1.0 - 1e-9;
    if (!out.is_selfmap) out.witness = worst_z;
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> StolzSchedule::radii() const {
    std::vector<double> out;
    for (int k = 3; k < 60; ++k) {
        const double r = 1.0 - std::ldexp(1.0, -k);
        if (r > r_max) break;
        out.push_back(r);
    }
    return out;
}

std::vector<Point> StolzSchedule::points(double radius) const {
    const double rho = 1.0 - radius;
    const double lim = 0.75 * std::acos(1.0 / alpha);
    std::vector<double> offsets{0.0};
    if (rays > 1) {
        const int side = (rays - 1) / 2;
        for (int j = 1; j <= side; ++j) {
            const double psi = lim * j / side;
            offsets.push_back(psi);
            offsets.push_back(-psi);
        }
        if ((rays - 1) % 2 == 1) offsets.push_back(lim);
    }
    const Point z0 = zeta();
    std::vector<Point> out;
    for (double psi : offsets) {
        const Point z = z0 * (1.0 - rho * std::polar(1.0, psi));
        const double m = std::abs(z);
        if (m > r_max) continue;
        if (!(std::abs(z - z0) < alpha * (1.0 - m))) continue;
        out.push_back(z);
    }
    return out;
}

std::string to_string(BetaClass b) {
    switch (b) {
        case BetaClass::Less1: return "beta<1";
        case BetaClass::Approx1: return "beta~1";
        case BetaClass::Greater1: return "beta>1";
        case BetaClass::Infinite: return "beta=inf";
        case BetaClass::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

AngularDerivative angular_derivative(const SelfMapExpr& map, const StolzSchedule& schedule,
                                     const Thresholds& th) {
    AngularDerivative out;
    out.profile.angle = schedule.angle;
    const auto radii = schedule.radii();
    std::vector<std::vector<double>> per_ray(static_cast<std::size_t>(std::max(1, schedule.rays)));
    for (double r : radii) {
        const auto pts = schedule.points(r);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const Point z = pts[j];
            const double v = (1.0 - std::abs(map.eval(z))) / (1.0 - std::abs(z));
            if (j < per_ray.size()) per_ray[j].push_back(v);
            if (j == 0) out.profile.samples.push_back({z, r, v});
        }
    }
    classify(out.profile, th);

    out.estimate = INFINITY;
    for (const auto& ray : per_ray) {
        if (ray.empty()) continue;
        const double t = median_of_last3(ray);
        out.ray_tails.push_back(t);
        out.estimate = std::min(out.estimate, t);
    }
    if (out.ray_tails.empty()) return out;

    const double b = out.estimate;
    if (b > 1e3)
        out.classification = BetaClass::Infinite;
    else if (b < 0.99)
        out.classification = BetaClass::Less1;
    else if (b <= 1.01)
        out.classification = BetaClass::Approx1;
    else if (out.profile.tail.band_last4 <= 2.0)
        out.classification = BetaClass::Greater1;
    else
        out.classification = BetaClass::Inconclusive;
    return out;
}

bool region_E(Point zeta, double k, Point z) {
    return std::norm(zeta - z) <= k * (1.0 - std::norm(z));
}

}  // namespace diskgeo
