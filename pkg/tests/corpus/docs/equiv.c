/* Reconstructed: an equivalence decider would decide universal
 * termination.  Parse-only; never executed. */
int equivalent(const char *first, const char *second);

/* Source of a program that runs `program` on its input, then returns 0. */
const char *run_then_return_zero(const char *program);

int universally_terminates(const char *program)
{
    return equivalent(run_then_return_zero(program), "int main(void) { return 0; }");
}
