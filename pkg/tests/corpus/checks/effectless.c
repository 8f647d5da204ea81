#define ZERO 0

int sink;

void stub(void)
{
}

void effects(int a)
{
    int t;
    a + 0;
    a + ZERO;
    stub();
    t = a;
    t = 2;
    sink = t;
    (void)a;
}
