#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wfsched/workflow.hpp"

namespace wfsched {

/// Unreadable or inconsistent workflow file. `where` names the offending spot
/// (line number for malformed XML, element for semantic problems).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct DaxOptions {
    /// DAX runtimes are seconds; weight_mi = runtime * reference_mips.
    double reference_mips = 1.0;
};

/// Pegasus DAX subset: <job id runtime> with <uses file link size>, and
/// <child ref><parent ref/></child>. Edges are the union of explicit
/// dependencies and producer/consumer file links; an edge carries the size of
/// the files it moves (bytes -> MB). The result is validated.
WorkflowDag parse_dax(std::string_view xml, const DaxOptions& options = {});

/// Native format: {"tasks":[{"id","weight_mi"}],"edges":[{"from","to","data_mb"}]}.
nlohmann::json workflow_to_json(const WorkflowDag& dag);
WorkflowDag workflow_from_json(const nlohmann::json& doc);

void write_workflow_json(std::ostream& out, const WorkflowDag& dag);
WorkflowDag read_workflow_json(std::istream& in);

/// Picks the format from the extension (.dax/.xml vs anything else = JSON).
WorkflowDag load_workflow(const std::string& path, const DaxOptions& options = {});

}  // namespace wfsched
