#pragma once

#include "dunits/binpoly.hpp"
#include "dunits/cli.hpp"
#include "dunits/field.hpp"
#include "dunits/fpoly.hpp"
#include "dunits/grpalg.hpp"
#include "dunits/linalg.hpp"
#include "dunits/numtheory.hpp"
#include "dunits/oracle.hpp"
#include "dunits/unitary.hpp"
#include "dunits/wedderburn.hpp"
