#pragma once

#define CPIP_VERSION "0.1.0"
