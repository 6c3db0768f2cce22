#include "gigomea/instance_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace gigomea
{

using json = nlohmann::ordered_json;

void write_instance(std::ostream &out, const ProblemInstance &instance)
{
    json doc;
    if (instance.kind() == ProblemKind::NKS1)
    {
        doc["kind"] = "NKS1";
    }
    else if (instance.kind() == ProblemKind::MaxCut)
    {
        doc["kind"] = "MaxCut";
        doc["variant"] = instance.maxcut_variant() == MaxCutVariant::Full ? "Full" : "Geo";
    }
    else
    {
        throw UnsupportedKind("only NK-S1 and MaxCut instances have a file format");
    }
    doc["ell"] = instance.dimension();
    doc["k"] = instance.k();
    doc["seed"] = instance.seed();
    if (instance.has_vtr())
        doc["vtr"] = instance.vtr();
    else
        doc["vtr"] = nullptr;

    if (instance.kind() == ProblemKind::NKS1)
    {
        doc["weights"] = instance.nk().tables;
    }
    else
    {
        const auto &graph = instance.graph();
        json edges = json::array();
        for (std::size_t i = 0; i < graph.vertices(); ++i)
            for (std::size_t j = i + 1; j < graph.vertices(); ++j)
                edges.push_back(json::array({i, j, graph.weight(i, j)}));
        doc["edges"] = std::move(edges);
    }
    out << doc.dump() << '\n';
}

ProblemInstance read_instance(std::istream &in)
{
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (const json::exception &e)
    {
        throw InstanceFormatError(std::string("instance is not valid JSON: ") + e.what());
    }

    try
    {
        const auto kind = doc.at("kind").get<std::string>();
        const auto ell = doc.at("ell").get<std::size_t>();
        const auto seed = doc.at("seed").get<std::uint64_t>();
        std::optional<double> vtr;
        if (!doc.at("vtr").is_null())
            vtr = doc.at("vtr").get<double>();

        if (kind == "NKS1")
        {
            NkTables nk;
            nk.k = doc.at("k").get<std::size_t>();
            nk.tables = doc.at("weights").get<std::vector<std::vector<double>>>();
            if (nk.k == 0 || nk.tables.size() + nk.k - 1 != ell)
                throw InstanceFormatError("NK-S1 table count does not match ell and k");
            for (const auto &t : nk.tables)
                if (t.size() != (std::size_t{1} << nk.k))
                    throw InstanceFormatError("NK-S1 table must hold 2^k weights");
            return ProblemInstance::nks1(std::move(nk), seed, vtr);
        }
        if (kind == "MaxCut")
        {
            const auto variant_name = doc.value("variant", std::string("Full"));
            if (variant_name != "Full" && variant_name != "Geo")
                throw InstanceFormatError("unknown MaxCut variant '" + variant_name + "'");
            if (ell < 2)
                throw InstanceFormatError("MaxCut requires ell >= 2");

            MaxCutGraph graph(ell);
            std::vector<std::uint8_t> seen(ell * ell, 0);
            std::size_t count = 0;
            for (const auto &edge : doc.at("edges"))
            {
                if (!edge.is_array() || edge.size() != 3)
                    throw InstanceFormatError("edge must be [i, j, weight]");
                const auto i = edge[0].get<std::size_t>();
                const auto j = edge[1].get<std::size_t>();
                if (i >= j || j >= ell)
                    throw InstanceFormatError("edge indices must satisfy i < j < ell");
                if (seen[i * ell + j]++)
                    throw InstanceFormatError("duplicate edge");
                graph.set_weight(i, j, edge[2].get<double>());
                ++count;
            }
            if (count != ell * (ell - 1) / 2)
                throw InstanceFormatError("MaxCut instances must be fully connected");
            return ProblemInstance::maxcut(std::move(graph),
                                           variant_name == "Full" ? MaxCutVariant::Full : MaxCutVariant::Geo,
                                           seed, vtr);
        }
        throw InstanceFormatError("unknown instance kind '" + kind + "'");
    }
    catch (const json::exception &e)
    {
        throw InstanceFormatError(std::string("malformed instance: ") + e.what());
    }
    catch (const std::invalid_argument &e)
    {
        throw InstanceFormatError(std::string("invalid instance: ") + e.what());
    }
}

void save_instance(const std::filesystem::path &path, const ProblemInstance &instance)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_instance(out, instance);
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

ProblemInstance load_instance(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InstanceFormatError("cannot open '" + path.string() + "'");
    return read_instance(in);
}

std::vector<ProblemInstance> load_instance_directory(const std::filesystem::path &dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<ProblemInstance> out;
    out.reserve(files.size());
    for (const auto &f : files)
        out.push_back(load_instance(f));
    return out;
}

} // namespace gigomea
