int clampTicks(unsigned short t) {
    return t % 1000;
}

void tickLoop(unsigned short t) {
    long long acc = clampTicks(t);
    int window = 0;
    window = acc;
    long long keep = window;
    keep = keep + 4;
}
