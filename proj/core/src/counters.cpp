// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/counters.hpp"

#include <sstream>

namespace lsth {

std::string StorageCounters::to_string() const {
  std::ostringstream os;
  os << "opened=" << files_opened << " written=" << files_written << " lists=" << list_calls
     << " bytes_read=" << bytes_read << " bytes_written=" << bytes_written;
  return os.str();
}

}  // namespace lsth
