#include "hill/error.hpp"

namespace hill {

void rethrow_with_context(const std::string& context) {
    const std::string prefix = context + ": ";
    try {
        throw;
    } catch (const SingularError& e) {
        throw SingularError(prefix + e.what(), e.condition());
    } catch (const ContractionError& e) {
        throw ContractionError(prefix + e.what(), e.measured_hs());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(prefix + e.what());
    } catch (const ProximityError& e) {
        throw ProximityError(prefix + e.what());
    } catch (const BudgetError& e) {
        throw BudgetError(prefix + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(prefix + e.what());
    } catch (const Error& e) {
        throw Error(prefix + e.what());
    }
}

}  // namespace hill
