#pragma once

#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>

namespace urcminer {

// Attributes of one `<row .../>` element, entity-decoded.
using XmlRow = std::map<std::string, std::string, std::less<>>;

using RowCallback = std::function<void(const XmlRow&, std::size_t line)>;

// Streams the `<row>` elements of a Stack Exchange dump file. Handles the
// XML declaration, comments and a single wrapping element (<posts>,
// <comments>, ...). `on_row` receives the 1-based line the row starts on.
// Throws ParseError carrying the line number on malformed markup. Returns
// the number of rows visited.
std::size_t read_dump_rows(std::istream& in, const RowCallback& on_row);

// Decodes the five predefined XML entities plus decimal and hex character
// references. Unknown entities are left verbatim.
std::string decode_entities(std::string_view text);

}  // namespace urcminer
