#include "weaktsa/log.h"

namespace weaktsa::log {

Level& level() {
  static Level current = Level::kInfo;
  return current;
}

}  // namespace weaktsa::log
