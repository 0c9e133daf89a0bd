#pragma once

// Single include point for cpp-httplib. The OpenSSL switch changes the layout
// of inline httplib classes, so every translation unit must see the same
// configuration; include this header instead of <httplib.h>.
#ifdef CITEGRAPH_HAS_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
