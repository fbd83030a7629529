#pragma once

#include <variant>

#include "wot/coap/message.hpp"
#include "wot/proxy/fib.hpp"
#include "wot/time.hpp"

namespace wot::proxy {

struct SendTo {
  NodeAddress to;
  coap::Message message;
};

/// Ask the driver to call back with the token at `at`.
struct StartTimer {
  Bytes token;
  SimTime at = 0;
};

/// The FIB points at this node itself; hand the request to the local origin.
struct DeliverLocal {
  coap::Message message;
  NodeAddress from;
};

using Action = std::variant<SendTo, StartTimer, DeliverLocal>;
using Actions = std::vector<Action>;

} // namespace wot::proxy
