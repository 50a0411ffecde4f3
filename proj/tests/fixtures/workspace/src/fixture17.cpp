long long hashSpread(unsigned short x) {
    return x * 65537LL;
}

void storeHash(unsigned short x) {
    long long spread = hashSpread(x);
    int slot = spread;
    long long seat = slot;
    seat = seat + 17;
}
