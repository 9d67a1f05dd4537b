#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rslab/hecke.hpp"

namespace rslab {

namespace fs = std::filesystem;

std::uint64_t fnv1a(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_stem(std::string const & label)
{
    std::string s;
    for (char c : label)
        s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
    return s.empty() ? "curve" : s;
}

std::int64_t parse_int(std::string_view s, std::string const & what)
{
    std::int64_t v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("eigenvalue cache: bad integer in " + what + ": '" + std::string(s) + "'");
    return v;
}

std::string header_value(std::istream & in, std::string const & key)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0)
        throw Error("eigenvalue cache: expected '" + key + "=' line");
    return line.substr(key.size() + 1);
}

} // namespace

void save_table(EigenvalueTable const & table, fs::path const & path)
{
    std::ostringstream body;
    body << "# rslab eigenvalue cache\n";
    body << "label=" << table.curve.label << '\n';
    auto const & a = table.curve.ainv;
    body << "ainv=" << a[0] << ',' << a[1] << ',' << a[2] << ',' << a[3] << ',' << a[4] << '\n';
    body << "conductor=" << table.curve.conductor << '\n';
    body << "root_number=" << table.curve.root_number << '\n';
    body << "n_max=" << table.n_max << '\n';
    body << "p,ap\n";
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(table.n_max)))
        body << p << ',' << table.a[p] << '\n';
    std::string const text = body.str();
    fs::path const tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("eigenvalue cache: cannot write " + tmp.string());
        out << text << "checksum=" << hex(fnv1a(text)) << '\n';
        if (!out)
            throw Error("eigenvalue cache: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

EigenvalueTable load_table(fs::path const & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("eigenvalue cache: cannot open " + path.string());
    std::string const text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto const pos = text.rfind("checksum=");
    if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n'))
        throw Error("eigenvalue cache: missing checksum line in " + path.string());
    std::string stored = text.substr(pos + 9);
    while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r'))
        stored.pop_back();
    std::string_view const body(text.data(), pos);
    if (stored != hex(fnv1a(body)))
        throw Error("eigenvalue cache: checksum mismatch in " + path.string());

    std::istringstream s{std::string(body)};
    std::string line;
    std::getline(s, line);
    CurveSpec E;
    E.label = header_value(s, "label");
    {
        std::string const ainv = header_value(s, "ainv");
        std::size_t start = 0;
        for (int i = 0; i < 5; ++i) {
            std::size_t const end = i < 4 ? ainv.find(',', start) : ainv.size();
            if (end == std::string::npos)
                throw Error("eigenvalue cache: bad ainv line");
            E.ainv[static_cast<std::size_t>(i)] = parse_int(std::string_view(ainv).substr(start, end - start), "ainv");
            start = end + 1;
        }
    }
    E.conductor = parse_int(header_value(s, "conductor"), "conductor");
    E.root_number = static_cast<int>(parse_int(header_value(s, "root_number"), "root_number"));
    std::int64_t const n_max = parse_int(header_value(s, "n_max"), "n_max");
    if (!std::getline(s, line) || line != "p,ap")
        throw Error("eigenvalue cache: missing column header");
    std::vector<std::int64_t> ap(static_cast<std::size_t>(n_max) + 1, 0);
    std::size_t rows = 0;
    while (std::getline(s, line)) {
        auto const comma = line.find(',');
        if (comma == std::string::npos)
            throw Error("eigenvalue cache: bad row '" + line + "'");
        std::int64_t const p = parse_int(std::string_view(line).substr(0, comma), "p");
        if (p < 2 || p > n_max)
            throw Error("eigenvalue cache: prime out of range");
        ap[static_cast<std::size_t>(p)] = parse_int(std::string_view(line).substr(comma + 1), "ap");
        ++rows;
    }
    if (rows != primes_up_to(static_cast<std::uint32_t>(n_max)).size())
        throw Error("eigenvalue cache: row count does not match n_max");
    return table_from_traces(E, n_max, ap);
}

EigenvalueTable get_or_build_table(CurveSpec const & curve, std::int64_t n_max, fs::path const & dir)
{
    fs::create_directories(dir);
    std::string const stem = file_stem(curve.label) + "_N";
    fs::path best;
    std::int64_t best_n = -1;
    for (auto const & entry : fs::directory_iterator(dir)) {
        std::string const name = entry.path().filename().string();
        if (name.rfind(stem, 0) != 0 || entry.path().extension() != ".csv")
            continue;
        std::string const digits = name.substr(stem.size(), name.size() - stem.size() - 4);
        std::int64_t n = 0;
        auto const [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc{} || ptr != digits.data() + digits.size())
            continue;
        if (n >= n_max && (best_n < 0 || n < best_n)) {
            best = entry.path();
            best_n = n;
        }
    }
    if (best_n >= 0) {
        try {
            EigenvalueTable cached = load_table(best);
            if (cached.curve.ainv == curve.ainv && cached.curve.conductor == curve.conductor) {
                if (cached.n_max == n_max) {
                    cached.curve = curve;
                    return cached;
                }
                std::vector<std::int64_t> ap(cached.a.begin(), cached.a.begin() + n_max + 1);
                return table_from_traces(curve, n_max, ap);
            }
        } catch (Error const &) {
            // corrupted entry: fall through to a recount
        }
        fs::remove(best);
    }
    EigenvalueTable t = build_table(curve, n_max);
    save_table(t, dir / (stem + std::to_string(n_max) + ".csv"));
    return t;
}

} // namespace rslab
