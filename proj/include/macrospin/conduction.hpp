#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace macrospin {

/// Clamped piecewise-linear table y(x). x must be strictly increasing.
struct LookupTable1D {
    std::vector<double> x;
    std::vector<double> y;

    bool valid() const {
        if (x.size() != y.size() || x.size() < 2) return false;
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1])) return false;
        return true;
    }

    double value(double xi) const {
        if (xi <= x.front()) return y.front();
        if (xi >= x.back()) return y.back();
        auto it = std::upper_bound(x.begin(), x.end(), xi);
        const std::size_t i = static_cast<std::size_t>(it - x.begin());
        const double t = (xi - x[i - 1]) / (x[i] - x[i - 1]);
        return y[i - 1] + t * (y[i] - y[i - 1]);
    }
};

/// Parse a two-column CSV (x,y) into a lookup table. Lines starting with '#'
/// and a single non-numeric header line are skipped.
inline LookupTable1D parse_table_csv(std::istream& in) {
    LookupTable1D table;
    std::string line;
    bool first_data = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a = 0.0, b = 0.0;
        if (!(ls >> a >> b)) {
            if (first_data) { first_data = false; continue; } // header row
            throw std::invalid_argument("lookup CSV: malformed line: " + line);
        }
        first_data = false;
        table.x.push_back(a);
        table.y.push_back(b);
    }
    if (!table.valid())
        throw std::invalid_argument("lookup CSV: need >= 2 rows with strictly increasing x");
    return table;
}

/// Junction resistance vs. relative magnetization angle.
///
/// Default model is conductance-linear in cos(theta_rel) (the cosine TMR
/// form): G(x) = Gp (1+x)/2 + Gap (1-x)/2, so R(1) = r_p, R(-1) = r_ap and
/// the perpendicular state sits at the harmonic mean 2 r_p r_ap/(r_p + r_ap).
/// A measured R(cos theta) table, when provided, replaces the cosine model.
struct Conduction {
    double r_p = 0.0;
    double r_ap = 0.0;
    std::optional<LookupTable1D> r_table; ///< x = cos(theta_rel) in [-1, 1]

    double resistance(double cos_theta_rel) const {
        const double x = std::clamp(cos_theta_rel, -1.0, 1.0);
        if (r_table) return r_table->value(x);
        const double g = 0.5 * ((1.0 + x) / r_p + (1.0 - x) / r_ap);
        return 1.0 / g;
    }

    double voltage(double current, double cos_theta_rel) const {
        return current * resistance(cos_theta_rel);
    }
};

} // namespace macrospin
