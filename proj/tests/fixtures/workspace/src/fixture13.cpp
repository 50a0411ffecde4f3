long long scaleMicros(unsigned short k) {
    return k * 1000000LL;
}

void storeMicros(unsigned short k) {
    long long micros = scaleMicros(k);
    int packed = micros;
    long long hold = packed;
    hold = hold + 13;
}
