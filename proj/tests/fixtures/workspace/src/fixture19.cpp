int wrapDelta(short x) {
    return x % 1000;
}

void packDelta(short x) {
    int delta = wrapDelta(x);
    signed char tiny = delta;
    int replay = tiny;
    replay = replay + 19;
}
