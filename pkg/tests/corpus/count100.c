_Bool nondet_bool();

int main()
{
  for(int i=0; i<100; i++)
  {
    if(nondet_bool()) break;
  }
  assert(0);
}
