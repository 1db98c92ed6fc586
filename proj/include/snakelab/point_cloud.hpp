#pragma once

// Weighted point clouds in R^d: the discrete carrier of occupation measures
// and ranges. CSV schema: header "x1,...,xd,weight", one row per point.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace snakelab {

struct PointCloud {
    int dim = 0;
    std::vector<double> coords;   // size() * dim, row-major
    std::vector<double> weights;  // one per point

    std::size_t size() const { return weights.size(); }

    const double* point(std::size_t i) const { return coords.data() + i * dim; }

    double total_mass() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    void push(const double* x, double w) {
        coords.insert(coords.end(), x, x + dim);
        weights.push_back(w);
    }

    void validate(double declared_total) const {
        if (coords.size() != size() * static_cast<std::size_t>(dim))
            throw std::invalid_argument("cloud: coords/weights size mismatch");
        for (double w : weights)
            if (!(w >= 0.0)) throw std::invalid_argument("cloud: negative weight");
        const double t = total_mass();
        if (std::abs(t - declared_total) > 1e-12 * std::max(1.0, std::abs(declared_total)))
            throw std::invalid_argument("cloud: weights do not sum to declared total mass");
    }

    static PointCloud with_uniform_weights(int dim, std::vector<double> coords,
                                           double total_mass) {
        PointCloud c;
        c.dim = dim;
        c.coords = std::move(coords);
        const std::size_t n = c.coords.size() / dim;
        if (n == 0) throw std::invalid_argument("cloud: empty");
        c.weights.assign(n, total_mass / static_cast<double>(n));
        return c;
    }
};

inline double dist2(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

inline void write_cloud_csv(const PointCloud& c, std::ostream& os) {
    os.precision(17);
    for (int j = 0; j < c.dim; ++j) os << 'x' << (j + 1) << ',';
    os << "weight\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double* p = c.point(i);
        for (int j = 0; j < c.dim; ++j) os << p[j] << ',';
        os << c.weights[i] << '\n';
    }
}

inline PointCloud read_cloud_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("cloud csv: empty stream");
    int dim = 0;
    {
        std::stringstream ss(header);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.empty() || cols.back() != "weight")
            throw std::runtime_error("cloud csv: last column must be 'weight'");
        dim = static_cast<int>(cols.size()) - 1;
        for (int j = 0; j < dim; ++j)
            if (cols[j] != "x" + std::to_string(j + 1))
                throw std::runtime_error("cloud csv: bad coordinate header");
    }
    PointCloud c;
    c.dim = dim;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
        if (row.size() != static_cast<std::size_t>(dim) + 1)
            throw std::runtime_error("cloud csv: bad row width");
        c.coords.insert(c.coords.end(), row.begin(), row.begin() + dim);
        c.weights.push_back(row.back());
    }
    return c;
}

}  // namespace snakelab
