#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rsense/params.hpp"

namespace rsense {

void to_json(nlohmann::json& j, const ParamSet& p);
void from_json(const nlohmann::json& j, ParamSet& p);
void to_json(nlohmann::json& j, const PhysicalParams& p);
void from_json(const nlohmann::json& j, PhysicalParams& p);

} // namespace rsense

namespace rsense::io {

/// A sampled function of time with the parameter point it belongs to.
struct Curve {
    std::vector<double> t;
    std::vector<double> y;
    ParamSet params;
    std::string quantity;

    /// Throws InvalidParameter unless t is strictly increasing and |t| == |y|.
    void check() const;
};

using Cell = std::variant<double, std::string>;

/// Column-labelled rows; the common payload of every CLI command.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Shortest round-trip text with 17 significant digits, '.' decimal point.
std::string format_double(double x);

void write_csv(std::ostream& os, const Table& table);
/// Header `t,value`.
void write_curve_csv(std::ostream& os, const Curve& curve);

/// Array of row objects; string cells stay strings, numeric cells stay numbers.
nlohmann::json table_to_json(const Table& table);

/// Sidecar describing a curve: parameter point, quantity label and units.
nlohmann::json curve_sidecar(const Curve& curve);

/// Unit annotations for the quantities the library emits (omega_z conventions).
nlohmann::json unit_annotations();

} // namespace rsense::io
