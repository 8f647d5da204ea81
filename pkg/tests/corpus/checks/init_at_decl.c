int later(int a)
{
    int x;
    x = a;
    return x;
}

int maybe(int a)
{
    int y;
    if (a > 0) {
        y = 1;
    }
    return y;
}

int initialized(int a)
{
    int z = a;
    return z;
}
