#include "orel/csv.hpp"

#include <fstream>
#include <sstream>

namespace orel {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

PlainTable ingest_csv(const std::string& path, const std::vector<PlainColumn>& schema, std::size_t pad_to) {
    std::ifstream in(path);
    if (!in) throw ProtocolError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ProtocolError("'" + path + "': empty file, header row required");
    auto header = split_line(line);
    if (header.size() != schema.size())
        throw ProtocolError("'" + path + "': header has " + std::to_string(header.size()) + " columns, schema has " +
                            std::to_string(schema.size()));
    for (std::size_t c = 0; c < schema.size(); c++)
        if (trim(header[c]) != schema[c].name)
            throw ProtocolError("'" + path + "': header column " + std::to_string(c + 1) + " is '" + trim(header[c]) +
                                "', schema says '" + schema[c].name + "'");

    PlainTable t;
    t.name = path;
    t.schema = schema;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        lineno++;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != schema.size())
            throw ProtocolError("'" + path + "' line " + std::to_string(lineno) + ": expected " +
                                std::to_string(schema.size()) + " cells, got " + std::to_string(cells.size()));
        std::vector<u64> row(schema.size());
        for (std::size_t c = 0; c < schema.size(); c++) {
            std::string cell = trim(cells[c]);
            u64 v = 0;
            try {
                std::size_t used = 0;
                v = std::stoull(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (...) {
                throw ProtocolError("'" + path + "' line " + std::to_string(lineno) + ", column '" + schema[c].name +
                                    "': '" + cell + "' is not an unsigned integer");
            }
            unsigned w = schema[c].width;
            if (w < 64 && v >= (u64{1} << w))
                throw ProtocolError("'" + path + "' line " + std::to_string(lineno) + ", column '" + schema[c].name +
                                    "': value " + std::to_string(v) + " overflows " + std::to_string(w) + " bits");
            row[c] = v;
        }
        t.data.push_back(std::move(row));
        t.valid.push_back(1);
    }
    while (pad_to > t.rows()) {
        t.data.emplace_back(schema.size(), 0);
        t.valid.push_back(0);
    }
    return t;
}

void write_csv(const ClearTable& t, std::ostream& os) {
    for (std::size_t c = 0; c < t.names.size(); c++) os << (c ? "," : "") << t.names[c];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); c++) os << (c ? "," : "") << u128_str(row[c]);
        os << "\n";
    }
}

namespace {

constexpr char kMagic[4] = {'O', 'S', 'H', '1'};

u64 schema_hash(const PlainTable& t) {
    u64 h = 1469598103934665603ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '|';
        h *= 1099511628211ull;
    };
    for (const auto& c : t.schema) {
        feed(c.name);
        feed(std::to_string(c.width));
    }
    return h;
}

void put_u16(std::ostream& os, u16 v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    os.write(b, 2);
}

void put_u64(std::ostream& os, u64 v) {
    char b[8];
    for (int i = 0; i < 8; i++) b[i] = static_cast<char>(v >> (8 * i));
    os.write(b, 8);
}

u16 get_u16(std::istream& is) {
    unsigned char b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    return static_cast<u16>(b[0] | (b[1] << 8));
}

u64 get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    u64 v = 0;
    for (int i = 0; i < 8; i++) v |= static_cast<u64>(b[i]) << (8 * i);
    return v;
}

void put_vec(std::ostream& os, const std::vector<u128>& v, unsigned width) {
    std::size_t bpe = (width + 7) / 8;
    for (u128 x : v)
        for (std::size_t b = 0; b < bpe; b++) os.put(static_cast<char>(x >> (8 * b)));
}

std::vector<u128> get_vec(std::istream& is, std::size_t n, unsigned width) {
    std::size_t bpe = (width + 7) / 8;
    std::vector<u128> out(n);
    for (std::size_t i = 0; i < n; i++) {
        u128 x = 0;
        for (std::size_t b = 0; b < bpe; b++) {
            int ch = is.get();
            if (ch < 0) throw ProtocolError("share file truncated");
            x |= static_cast<u128>(static_cast<unsigned char>(ch)) << (8 * b);
        }
        out[i] = x & width_mask(width);
    }
    return out;
}

}  // namespace

void write_share_files(const PlainTable& t, const std::string& path_prefix, u64 dealer_seed) {
    Prg dealer(dealer_seed, 0xd3a1);
    auto views = share_plain_table(t, dealer);
    for (int p = 0; p < 3; p++) {
        std::ofstream os(path_prefix + ".p" + std::to_string(p), std::ios::binary);
        if (!os) throw ProtocolError("cannot write share file for party " + std::to_string(p));
        os.write(kMagic, 4);
        put_u16(os, 1);  // version
        put_u64(os, schema_hash(t));
        put_u64(os, t.rows());
        put_u16(os, static_cast<u16>(t.schema.size()));
        for (const auto& c : t.schema) {
            put_u16(os, static_cast<u16>(c.name.size()));
            os.write(c.name.data(), static_cast<std::streamsize>(c.name.size()));
            put_u16(os, static_cast<u16>(c.width));
            os.put(c.enc == Encoding::Arithmetic ? 'A' : 'B');
        }
        const SecretTable& view = views[p];
        put_vec(os, view.validity.sh[0], 1);
        put_vec(os, view.validity.sh[1], 1);
        for (const auto& col : view.columns) {
            put_vec(os, col.data.sh[0], col.data.width);
            put_vec(os, col.data.sh[1], col.data.width);
        }
    }
}

SecretTable read_share_file(const std::string& path, int party) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ProtocolError("cannot open share file '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (std::string(magic, 4) != std::string(kMagic, 4)) throw ProtocolError("'" + path + "' is not a share file");
    u16 version = get_u16(is);
    if (version != 1) throw ProtocolError("unsupported share file version");
    (void)get_u64(is);  // schema hash, informational
    u64 n = get_u64(is);
    u16 ncols = get_u16(is);
    SecretTable t;
    t.name = path;
    struct ColMeta {
        std::string name;
        unsigned width;
        Encoding enc;
    };
    std::vector<ColMeta> metas;
    for (u16 c = 0; c < ncols; c++) {
        u16 len = get_u16(is);
        std::string name(len, '\0');
        is.read(name.data(), len);
        u16 width = get_u16(is);
        char e = static_cast<char>(is.get());
        metas.push_back({name, width, e == 'A' ? Encoding::Arithmetic : Encoding::Boolean});
    }
    t.validity = SecretVector(n, 1, Encoding::Boolean, party);
    t.validity.sh[0] = get_vec(is, n, 1);
    t.validity.sh[1] = get_vec(is, n, 1);
    for (const auto& m : metas) {
        SecretVector col(n, m.width, m.enc, party);
        col.sh[0] = get_vec(is, n, m.width);
        col.sh[1] = get_vec(is, n, m.width);
        t.add_column(m.name, std::move(col));
    }
    return t;
}

}  // namespace orel
