long long futureStamp(unsigned short delta) {
    return delta + 2200000000LL;
}

void stampEvent(unsigned short delta) {
    long long stamp = futureStamp(delta);
    int when = 0;
    when = stamp;
    long long track = when;
    track = track + 15;
}
