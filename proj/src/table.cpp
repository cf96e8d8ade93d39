#include "orel/table.hpp"

namespace orel {

bool SecretTable::has_column(const std::string& c) const {
    for (const auto& col : columns)
        if (col.name == c) return true;
    return false;
}

SecretVector& SecretTable::col(const std::string& name) {
    for (auto& c : columns)
        if (c.name == name) return c.data;
    throw ProtocolError("table '" + this->name + "' has no column '" + name + "'");
}

const SecretVector& SecretTable::col(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return c.data;
    throw ProtocolError("table '" + this->name + "' has no column '" + name + "'");
}

void SecretTable::add_column(const std::string& name, SecretVector data) {
    if (has_column(name)) throw ProtocolError("duplicate column '" + name + "'");
    columns.push_back({name, std::move(data)});
}

void SecretTable::drop_column(const std::string& name) {
    for (auto it = columns.begin(); it != columns.end(); ++it)
        if (it->name == name) {
            columns.erase(it);
            return;
        }
    throw ProtocolError("drop_column: no column '" + name + "'");
}

std::vector<std::string> SecretTable::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(c.name);
    return out;
}

std::vector<SecretVector*> SecretTable::all_vectors() {
    std::vector<SecretVector*> out;
    out.reserve(columns.size() + 1);
    for (auto& c : columns) out.push_back(&c.data);
    out.push_back(&validity);
    return out;
}

void SecretTable::check_uniform() const {
    for (const auto& c : columns)
        if (c.data.n != validity.n)
            throw ProtocolError("table '" + name + "': column '" + c.name + "' length differs from validity");
}

SecretTable make_table(PartyContext& ctx, const std::string& name, std::size_t rows) {
    SecretTable t;
    t.name = name;
    t.validity = public_constant(ctx, 1, rows, 1, Encoding::Boolean);
    return t;
}

}  // namespace orel
