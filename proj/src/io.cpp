#include "rsense/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "rsense/errors.hpp"

namespace rsense {

void to_json(nlohmann::json& j, const ParamSet& p) {
    j = nlohmann::json{{"P", p.P}, {"Q", p.Q}, {"zeta", p.zeta}, {"chi", p.chi}};
}

void from_json(const nlohmann::json& j, ParamSet& p) {
    ParamSet out;
    j.at("P").get_to(out.P);
    j.at("Q").get_to(out.Q);
    j.at("zeta").get_to(out.zeta);
    j.at("chi").get_to(out.chi);
    p = out;
}

void to_json(nlohmann::json& j, const PhysicalParams& p) {
    j = nlohmann::json{{"m_A", p.m_A}, {"m_B", p.m_B}, {"omega_A", p.omega_A}, {"omega_z", p.omega_z},
                       {"a_B", p.a_B}, {"a_AB", p.a_AB}, {"n", p.n}};
    if (p.mu_m) {
        j["mu_m"] = *p.mu_m;
    }
    if (p.chi) {
        j["chi"] = *p.chi;
    }
}

void from_json(const nlohmann::json& j, PhysicalParams& p) {
    PhysicalParams out;
    j.at("m_A").get_to(out.m_A);
    j.at("m_B").get_to(out.m_B);
    j.at("omega_A").get_to(out.omega_A);
    j.at("omega_z").get_to(out.omega_z);
    j.at("a_B").get_to(out.a_B);
    j.at("a_AB").get_to(out.a_AB);
    j.at("n").get_to(out.n);
    if (j.contains("mu_m")) {
        out.mu_m = j.at("mu_m").get<double>();
    }
    if (j.contains("chi")) {
        out.chi = j.at("chi").get<double>();
    }
    p = out;
}

} // namespace rsense

namespace rsense::io {

void Curve::check() const {
    if (t.size() != y.size()) {
        throw InvalidParameter("curve has " + std::to_string(t.size()) + " times but " +
                               std::to_string(y.size()) + " values");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            throw InvalidParameter("curve times must be strictly increasing");
        }
    }
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw InvalidParameter("row has " + std::to_string(row.size()) + " cells, table has " +
                               std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

void write_cell(std::ostream& os, const Cell& cell) {
    if (const double* d = std::get_if<double>(&cell)) {
        os << format_double(*d);
    } else {
        os << std::get<std::string>(cell);
    }
}

} // namespace

void write_csv(std::ostream& os, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        os << (c ? "," : "") << table.columns[c];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                os << ',';
            }
            write_cell(os, row[c]);
        }
        os << '\n';
    }
}

void write_curve_csv(std::ostream& os, const Curve& curve) {
    curve.check();
    os << "t,value\n";
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        os << format_double(curve.t[i]) << ',' << format_double(curve.y[i]) << '\n';
    }
}

nlohmann::json table_to_json(const Table& table) {
    auto rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (const double* d = std::get_if<double>(&row[c])) {
                obj[table.columns[c]] = *d;
            } else {
                obj[table.columns[c]] = std::get<std::string>(row[c]);
            }
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

nlohmann::json unit_annotations() {
    return {
        {"t", "1/omega_z"},
        {"omega", "omega_z"},
        {"k", "1/l_B"},
        {"curvature", "omega_z l_B^2"},
        {"g_m", "omega_z^-1/2"},
        {"g_M", "omega_z^-1/2"},
        {"a_m", "omega_z^1/2"},
        {"a_M", "omega_z^1/2"},
        {"A", "omega_z"},
        {"B", "omega_z^1/2"},
        {"C", "dimensionless"},
        {"gamma", "dimensionless"},
        {"qfi", "dimensionless (per unit chi^2)"},
    };
}

nlohmann::json curve_sidecar(const Curve& curve) {
    return {
        {"schema", "rsense.curve/1"},
        {"quantity", curve.quantity},
        {"params", curve.params},
        {"samples", curve.t.size()},
        {"units", unit_annotations()},
    };
}

} // namespace rsense::io
