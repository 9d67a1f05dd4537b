#include "rslab/run_config.hpp"

#include <charconv>
#include <set>

namespace rslab {

namespace {

std::int64_t to_int(std::string_view s, std::string const & what)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    std::int64_t v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("bad integer in " + what + ": '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto const pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

template <typename T>
T get(nlohmann::json const & j, char const * key)
{
    try {
        return j.at(key).get<T>();
    } catch (nlohmann::json::exception const & e) {
        throw Error(std::string("config key '") + key + "': " + e.what());
    }
}

std::vector<std::int64_t> int_list(nlohmann::json const & v, char const * key)
{
    if (v.is_string())
        return parse_int_list(v.get<std::string>());
    if (v.is_number_integer())
        return {v.get<std::int64_t>()};
    if (v.is_array()) {
        std::vector<std::int64_t> out;
        for (auto const & e : v) {
            if (!e.is_number_integer())
                throw Error(std::string("config key '") + key + "': expected integers");
            out.push_back(e.get<std::int64_t>());
        }
        return out;
    }
    throw Error(std::string("config key '") + key + "': expected an integer, list, or string");
}

std::pair<std::int64_t, std::int64_t> range_value(nlohmann::json const & v, char const * key)
{
    if (v.is_string())
        return parse_range(v.get<std::string>());
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        std::pair<std::int64_t, std::int64_t> r{v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
        if (r.first > r.second)
            throw Error(std::string("config key '") + key + "': empty range");
        return r;
    }
    throw Error(std::string("config key '") + key + "': expected \"LO:HI\" or [LO, HI]");
}

} // namespace

std::pair<std::int64_t, std::int64_t> parse_range(std::string const & text)
{
    auto const parts = split(text, ':');
    if (parts.size() != 2)
        throw Error("range must look like LO:HI, got '" + text + "'");
    std::pair<std::int64_t, std::int64_t> r{to_int(parts[0], "range"), to_int(parts[1], "range")};
    if (r.first > r.second)
        throw Error("range " + text + " has LO > HI");
    return r;
}

std::vector<std::int64_t> parse_int_list(std::string const & text)
{
    std::vector<std::int64_t> out;
    for (auto part : split(text, ','))
        out.push_back(to_int(part, "list"));
    return out;
}

std::vector<double> parse_double_list(std::string const & text)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        std::string const s(part);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (std::exception const &) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw Error("bad number in list: '" + s + "'");
        out.push_back(v);
    }
    return out;
}

RunConfig RunConfig::from_json(nlohmann::json const & j)
{
    if (!j.is_object())
        throw Error("config must be a JSON object");
    static std::set<std::string> const known = {"verb", "curve", "disc", "disc-range", "out", "format", "cache",
                                                "jobs", "force", "kernel-sigma", "kernel-T", "cutoff-mult", "a",
                                                "b-range", "s", "n-max", "x-grid"};
    for (auto const & [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw Error("unknown config key '" + key + "'");
    }
    RunConfig c;
    if (j.contains("verb"))
        c.verb = get<std::string>(j, "verb");
    if (j.contains("curve"))
        c.curve = get<std::string>(j, "curve");
    if (j.contains("disc"))
        c.disc = int_list(j["disc"], "disc");
    if (j.contains("disc-range"))
        c.disc_range = range_value(j["disc-range"], "disc-range");
    if (j.contains("out"))
        c.out = get<std::string>(j, "out");
    if (j.contains("format"))
        c.format = get<std::string>(j, "format");
    if (j.contains("cache"))
        c.cache = get<std::string>(j, "cache");
    if (j.contains("jobs"))
        c.jobs = get<int>(j, "jobs");
    if (j.contains("force"))
        c.force = get<bool>(j, "force");
    if (j.contains("kernel-sigma"))
        c.kernel_sigma = get<double>(j, "kernel-sigma");
    if (j.contains("kernel-T"))
        c.kernel_T = get<double>(j, "kernel-T");
    if (j.contains("cutoff-mult"))
        c.cutoff_mult = get<double>(j, "cutoff-mult");
    if (j.contains("a"))
        c.a = get<std::int64_t>(j, "a");
    if (j.contains("b-range"))
        c.b_range = range_value(j["b-range"], "b-range");
    if (j.contains("s"))
        c.s = get<double>(j, "s");
    if (j.contains("n-max"))
        c.n_max = get<std::int64_t>(j, "n-max");
    if (j.contains("x-grid")) {
        auto const & v = j["x-grid"];
        c.x_grid = v.is_string() ? parse_double_list(v.get<std::string>()) : get<std::vector<double>>(j, "x-grid");
    }
    c.validate();
    return c;
}

void RunConfig::validate() const
{
    if (format != "csv" && format != "json")
        throw Error("format must be csv or json, got '" + format + "'");
    if (jobs < 0 || jobs > 1024)
        throw Error("jobs must lie in [0, 1024]");
    if (kernel_sigma && !(*kernel_sigma > 0 && *kernel_sigma < 100))
        throw Error("kernel-sigma must lie in (0, 100)");
    if (kernel_T && !(*kernel_T > 0 && *kernel_T <= 2000))
        throw Error("kernel-T must lie in (0, 2000]");
    if (!(cutoff_mult >= 1 && cutoff_mult <= 200))
        throw Error("cutoff-mult must lie in [1, 200]");
    if (disc_range && disc_range->second >= 0)
        throw Error("disc-range must consist of negative discriminants");
    for (double x : x_grid)
        if (!(x > 0))
            throw Error("x-grid values must be positive");
    if (n_max < 0)
        throw Error("n-max must be nonnegative");
}

TruncationParams RunConfig::truncation() const
{
    TruncationParams p;
    p.cutoff_mult = cutoff_mult;
    if (kernel_sigma)
        p.kernel.sigma = *kernel_sigma;
    if (kernel_T)
        p.kernel.T = *kernel_T;
    p.validate();
    return p;
}

std::vector<std::int64_t> RunConfig::discriminants() const
{
    std::vector<std::int64_t> out = disc;
    if (disc_range) {
        auto range = fundamental_discriminants(disc_range->first, disc_range->second);
        std::sort(range.begin(), range.end(), std::greater<>());
        out.insert(out.end(), range.begin(), range.end());
    }
    return out;
}

} // namespace rslab
